// Convenience umbrella.
#pragma once

#include "eulermaclaurin.hpp"
#include "fit.hpp"
#include "heattrace.hpp"
#include "rational.hpp"
#include "rational_linalg.hpp"
#include "rootsys.hpp"
#include "summation.hpp"
#include "verify.hpp"
#include "volume.hpp"
