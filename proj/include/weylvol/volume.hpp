// Closed-form volumes: the flag-manifold product formula, weight and coroot
// covolumes, and torus/group volumes assembled from them.
//
// flag_volume keeps a process-wide call counter. Verification code uses it
// to prove the spectral pipeline never consults the formula it is trying to
// reproduce; only torus_volume (pure lattice data) crosses that boundary.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <json.hpp>

#include "rational.hpp"
#include "rootsys.hpp"

namespace weylvol::volume {

inline std::atomic<std::uint64_t>& flag_volume_call_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

struct FlagVolume {
    double value = 0;        // (2 pi)^m / prod <alpha, rho>
    Rational hc_product{1};  // prod_{alpha > 0} <alpha, rho>, exact
};

/// vol(G/T) = prod_{alpha in Phi^+} 2 pi / <alpha, rho>. The rational product
/// is exact; only the final division is floating point (in log space, so E8
/// and scaled variants cannot overflow).
inline FlagVolume flag_volume(const rootsys::RootSystem& rs) {
    flag_volume_call_counter().fetch_add(1, std::memory_order_relaxed);
    FlagVolume out;
    out.hc_product = rs.rho_pairing_product;
    out.value = std::exp(double(rs.m) * std::log(2 * std::numbers::pi) - rs.log_rho_product_d);
    return out;
}

/// det of the fundamental-weight Gram matrix, exact. vol(P)^2.
inline Rational weight_covolume_sq(const rootsys::RootSystem& rs) {
    Rational det = 1;
    for (const auto& d : rs.gram_udut.d) det *= d;
    return det;
}

/// vol(P): covolume of the weight lattice in t*.
inline double weight_covolume(const rootsys::RootSystem& rs) {
    double log_det = 0;
    for (const auto& d : rs.gram_udut.d) log_det += std::log(to_double(d));
    return std::exp(0.5 * log_det);
}

/// vol(Q) = 1/vol(P): covolume of the coroot lattice (dual parallelepipeds).
inline Rational coroot_covolume_sq(const rootsys::RootSystem& rs) { return 1 / weight_covolume_sq(rs); }

inline double coroot_covolume(const rootsys::RootSystem& rs) { return 1.0 / weight_covolume(rs); }

/// vol(T) = (2 pi)^r / vol(P).
inline double torus_volume(const rootsys::RootSystem& rs) {
    double log_det = 0;
    for (const auto& d : rs.gram_udut.d) log_det += std::log(to_double(d));
    return std::exp(double(rs.r) * std::log(2 * std::numbers::pi) - 0.5 * log_det);
}

/// vol(G) = vol(G/T) x vol(T).
inline double group_volume(const rootsys::RootSystem& rs) {
    return flag_volume(rs).value * torus_volume(rs);
}

struct VolumeReport {
    std::string group;
    int r = 0, m = 0, n = 0;
    BigInt weyl_order;
    double flag_volume = 0;
    double covol_weights = 0;
    double covol_coroots = 0;
    double torus_volume = 0;
    double group_volume = 0;
    Rational hc_product_exact{1};
};

inline VolumeReport volume_report(const rootsys::RootSystem& rs) {
    VolumeReport rep;
    rep.group = rs.name;
    rep.r = rs.r;
    rep.m = rs.m;
    rep.n = rs.n;
    rep.weyl_order = rs.weyl_order;
    FlagVolume fv = flag_volume(rs);
    rep.flag_volume = fv.value;
    rep.hc_product_exact = fv.hc_product;
    rep.covol_weights = weight_covolume(rs);
    rep.covol_coroots = coroot_covolume(rs);
    rep.torus_volume = torus_volume(rs);
    rep.group_volume = rep.flag_volume * rep.torus_volume;
    return rep;
}

inline nlohmann::ordered_json to_json(const VolumeReport& rep) {
    nlohmann::ordered_json j;
    j["group"] = rep.group;
    j["r"] = rep.r;
    j["m"] = rep.m;
    j["n"] = rep.n;
    j["weyl_order"] = rep.weyl_order.str();
    j["flag_volume"] = rep.flag_volume;
    j["covol_weights"] = rep.covol_weights;
    j["covol_coroots"] = rep.covol_coroots;
    j["torus_volume"] = rep.torus_volume;
    j["group_volume"] = rep.group_volume;
    j["hc_product_exact"] = format_rational(rep.hc_product_exact);
    return j;
}

}  // namespace weylvol::volume
