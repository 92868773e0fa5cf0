// Heat trace Z(t) over the dominant-weight lattice, its shifted d(lambda)
// form, and two independent evaluations of the Gaussian integral I(t).
//
// Truncation policy: the enumeration radius doubles until the change falls
// under rel_tol and an analytic shellwise majorant certifies the discarded
// tail. Terms are evaluated in log space and accumulated with compensated
// partial sums over fixed first-coordinate blocks, merged in block order,
// so results are bit-identical for every thread count.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rational.hpp"
#include "rational_linalg.hpp"
#include "rootsys.hpp"
#include "summation.hpp"
#include "volume.hpp"

namespace weylvol::heat {

struct HeatTraceSample {
    double t = 0;
    double z = 0;       // truncated Z(t)
    double scaled = 0;  // (4 pi t)^{n/2} z
    double cutoff_radius = 0;
    double tail_estimate = 0;
    std::int64_t terms_used = 0;
};

struct HeatTraceOptions {
    double rel_tol = 1e-6;
    std::int64_t max_terms = 20'000'000;
    unsigned threads = 0;  // 0 = WEYLVOL_THREADS if set, else 1
    int spectral_dim_limit = 30;
};

class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& msg, HeatTraceSample partial)
        : std::runtime_error(msg), partial_(partial) {}
    const HeatTraceSample& partial() const { return partial_; }

private:
    HeatTraceSample partial_;
};

/// WEYLVOL_THREADS caps the worker count; an explicit request below the cap
/// wins. With nothing configured evaluation is single-threaded (results do
/// not depend on this either way).
inline unsigned resolve_threads(unsigned requested) {
    unsigned cap = 0;
    if (const char* env = std::getenv("WEYLVOL_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) cap = unsigned(v);
    }
    unsigned base = requested > 0 ? requested : (cap > 0 ? cap : 1);
    if (cap > 0 && base > cap) base = cap;
    return base;
}

namespace detail {

struct EvalResult {
    double inner = 0;  // compensated sum of terms (without the e^{t|rho|^2} factor)
    std::int64_t count = 0;
};

struct BudgetExceeded {};

// Geometry constants reused across radii for one evaluation.
struct EvalContext {
    const rootsys::RootSystem* rs = nullptr;
    double t = 0;
    bool shifted = false;
    double rho_norm2_d = 0;
    std::vector<double> gram_rho;    // (G rho)_i: <e_i, rho>
    double log_k_alpha = 0;          // sum_k log |alpha_k| - log prod <alpha,rho>
    double log_ball_const = 0;       // log of unit-ball volume / vol(P)
    double covering_delta = 0;       // sum_i |lambda_i|
};

inline EvalContext make_context(const rootsys::RootSystem& rs, double t, bool shifted) {
    EvalContext cx;
    cx.rs = &rs;
    cx.t = t;
    cx.shifted = shifted;
    cx.rho_norm2_d = to_double(rs.rho_norm2);
    cx.gram_rho.assign(rs.r, 0.0);
    for (int i = 0; i < rs.r; ++i)
        for (int j = 0; j < rs.r; ++j) cx.gram_rho[i] += to_double(rs.gram_weights(i, j));
    double log_norms = 0;
    for (int k = 0; k < rs.m; ++k) {
        // |alpha_k|^2 = sum_j <alpha_k, lambda_j> * (C^T c_k)_j
        double n2 = 0;
        for (int j = 0; j < rs.r; ++j) {
            double u = 0;
            for (int i = 0; i < rs.r; ++i) u += double(rs.positive_roots[k][i]) * double(rs.cartan[i][j]);
            n2 += rs.root_pairing_d[k][j] * u;
        }
        log_norms += 0.5 * std::log(n2);
    }
    cx.log_k_alpha = log_norms - rs.log_rho_product_d;
    double log_det = 0;
    for (const auto& d : rs.gram_udut.d) log_det += std::log(to_double(d));
    cx.log_ball_const = double(rs.r) / 2.0 * std::log(std::numbers::pi) -
                        std::lgamma(double(rs.r) / 2.0 + 1.0) - 0.5 * log_det;
    cx.covering_delta = rs.sum_weight_norm_d;
    return cx;
}

/// Shellwise upper bound on the discarded mass beyond radius R, in the same
/// units as the returned z. Uses dim(V) <= prod|alpha| |mu|^m / prod<a,rho>
/// and a parallelepiped covering count for lattice points per shell.
inline double tail_majorant(const EvalContext& cx, double R) {
    const auto& rs = *cx.rs;
    const double t = cx.t;
    const double rho_n = rs.rho_norm_d;
    const std::int64_t s0 = std::max<std::int64_t>(0, std::int64_t(std::floor(R * (1.0 - 1e-6))));
    double acc = 0;
    for (std::int64_t s = s0;; ++s) {
        const double sd = double(s);
        const double reach = cx.shifted ? sd + 1.0 : sd + 1.0 + rho_n;
        double lg = cx.log_ball_const + double(rs.r) * std::log(sd + 1.0 + cx.covering_delta) +
                    2.0 * (double(rs.m) * std::log(reach) + cx.log_k_alpha) - t * sd * sd;
        if (cx.shifted) lg += t * cx.rho_norm2_d;
        const double shell = lg < -740.0 ? 0.0 : std::exp(lg);
        acc += shell;
        if (s > s0 + 4 && (shell == 0.0 || shell < acc * 1e-12)) break;
        if (s > s0 + 100000000) throw std::logic_error("tail_majorant: shell sum did not converge");
    }
    return acc;
}

/// One truncated evaluation at fixed radius. Deterministic: disjoint
/// first-coordinate blocks of fixed width, per-block compensated partials,
/// merged in ascending block order.
inline EvalResult eval_at_radius(const EvalContext& cx, double R, unsigned threads,
                                 std::int64_t max_terms) {
    const auto& rs = *cx.rs;
    const double t = cx.t;
    const bool shifted = cx.shifted;
    constexpr std::int64_t kBlock = 8;
    const std::int64_t x0_max = rootsys::first_coord_bound(rs, R);
    const std::size_t nblocks = std::size_t(x0_max / kBlock) + 1;

    std::vector<NeumaierSum> partial(nblocks);
    std::vector<std::int64_t> counts(nblocks, 0);
    std::vector<std::exception_ptr> errors(nblocks);
    std::atomic<std::int64_t> used{0};

    auto task = [&](std::size_t b) {
        try {
            rootsys::BallSlice slice;
            slice.radius = R;
            slice.x0_lo = std::int64_t(b) * kBlock;
            slice.x0_hi = slice.x0_lo + kBlock - 1;
            NeumaierSum& acc = partial[b];
            std::int64_t local = 0;
            rootsys::for_each_dominant_in_ball(rs, slice, [&](const rootsys::WeightCoords& x) {
                if (shifted) {
                    for (int i = 0; i < rs.r; ++i)
                        if (x[i] == 0) return;  // wall: d(lambda) = 0 exactly
                }
                double log_prod = 0;
                for (int k = 0; k < rs.m; ++k) {
                    const auto& row = rs.root_pairing_d[k];
                    double p = shifted ? 0.0 : rs.rho_pairings_d[k];
                    for (int j = 0; j < rs.r; ++j) p += row[j] * double(x[j]);
                    log_prod += std::log(p);
                }
                double q = 0;  // |x|^2 via the factored form
                for (int k = 0; k < rs.r; ++k) {
                    double l = double(x[k]);
                    for (int j = 0; j < k; ++j) l += rs.udut_coef_d[k][j] * double(x[j]);
                    q += rs.udut_diag_d[k] * l * l;
                }
                double lg;
                if (shifted) {
                    lg = 2.0 * (log_prod - rs.log_rho_product_d) - t * q;
                } else {
                    double xr = 0;  // <x, rho>
                    for (int i = 0; i < rs.r; ++i) xr += cx.gram_rho[i] * double(x[i]);
                    lg = 2.0 * (log_prod - rs.log_rho_product_d) - t * (q + 2.0 * xr);
                }
                acc.add(lg < -740.0 ? 0.0 : std::exp(lg));
                ++local;
                if ((local & 0xfff) == 0 &&
                    used.load(std::memory_order_relaxed) + local > max_terms)
                    throw BudgetExceeded{};
            });
            counts[b] = local;
            if (used.fetch_add(local, std::memory_order_relaxed) + local > max_terms)
                throw BudgetExceeded{};
        } catch (...) {
            errors[b] = std::current_exception();
        }
    };
    run_indexed_tasks(nblocks, threads, task);
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    EvalResult out;
    NeumaierSum total;
    for (std::size_t b = 0; b < nblocks; ++b) {
        total.merge(partial[b]);
        out.count += counts[b];
    }
    out.inner = total.value();
    return out;
}

inline double finalize_z(const EvalContext& cx, double inner) {
    return cx.shifted ? std::exp(cx.t * cx.rho_norm2_d) * inner : inner;
}

inline HeatTraceSample make_sample(const EvalContext& cx, double z, double R, double tail,
                                   std::int64_t terms) {
    HeatTraceSample s;
    s.t = cx.t;
    s.z = z;
    s.scaled = std::exp(double(cx.rs->n) / 2.0 * std::log(4.0 * std::numbers::pi * cx.t) + std::log(z));
    s.cutoff_radius = R;
    s.tail_estimate = tail;
    s.terms_used = terms;
    return s;
}

inline double initial_radius(const rootsys::RootSystem& rs, double t, double rel_tol) {
    double budget = -std::log(rel_tol) + double(rs.m) * std::log1p(1.0 / t) + 5.0;
    return rs.rho_norm_d + std::sqrt(budget / t);
}

inline HeatTraceSample heat_trace_impl(const rootsys::RootSystem& rs, double t,
                                       const HeatTraceOptions& opt, bool shifted) {
    if (!(t > 0)) throw std::invalid_argument("heat_trace: t must be positive");
    if (!(opt.rel_tol > 0) || opt.rel_tol > 1e-3)
        throw std::invalid_argument("heat_trace: rel_tol must lie in (0, 1e-3]");
    if (rs.n > opt.spectral_dim_limit)
        throw std::domain_error("heat_trace: spectral evaluation is gated to dim G <= " +
                                std::to_string(opt.spectral_dim_limit) +
                                " (dim G = " + std::to_string(rs.n) + "); formulas only");
    const unsigned threads = resolve_threads(opt.threads);
    EvalContext cx = detail::make_context(rs, t, shifted);

    double R = initial_radius(rs, t, opt.rel_tol);
    EvalResult prev;
    double prev_z = 0;
    bool have_prev = false;
    try {
        prev = eval_at_radius(cx, R, threads, opt.max_terms);
        prev_z = finalize_z(cx, prev.inner);
        have_prev = true;
        for (int iter = 0; iter < 48; ++iter) {
            const double R2 = 2.0 * R;
            EvalResult cur = eval_at_radius(cx, R2, threads, opt.max_terms);
            const double z = finalize_z(cx, cur.inner);
            const double tail = tail_majorant(cx, R2);
            if (std::abs(z - prev_z) <= opt.rel_tol * std::abs(prev_z) &&
                tail <= opt.rel_tol * std::abs(z))
                return make_sample(cx, z, R2, tail, cur.count);
            R = R2;
            prev = cur;
            prev_z = z;
        }
    } catch (const BudgetExceeded&) {
        HeatTraceSample partial =
            have_prev ? make_sample(cx, prev_z, R, tail_majorant(cx, R), prev.count)
                      : HeatTraceSample{t, 0, 0, R, 0, 0};
        throw TruncationError("heat_trace: tolerance unreachable within max_terms", partial);
    }
    throw TruncationError("heat_trace: radius doubling did not converge",
                          make_sample(cx, prev_z, R, tail_majorant(cx, R), prev.count));
}

}  // namespace detail

/// Z(t) = sum over dominant lambda of dim(V_lambda)^2 e^{t C_lambda}.
inline HeatTraceSample heat_trace(const rootsys::RootSystem& rs, double t,
                                  const HeatTraceOptions& opt = {}) {
    return detail::heat_trace_impl(rs, t, opt, false);
}

inline HeatTraceSample heat_trace(const rootsys::RootSystem& rs, double t, double rel_tol) {
    HeatTraceOptions opt;
    opt.rel_tol = rel_tol;
    return heat_trace(rs, t, opt);
}

/// Z(t) = e^{t|rho|^2} sum over strictly dominant mu of d(mu)^2 e^{-t|mu|^2};
/// wall weights contribute exactly zero and are skipped. Term-by-term equal
/// to heat_trace under mu = lambda + rho.
inline HeatTraceSample heat_trace_shifted(const rootsys::RootSystem& rs, double t,
                                          const HeatTraceOptions& opt = {}) {
    return detail::heat_trace_impl(rs, t, opt, true);
}

inline HeatTraceSample heat_trace_shifted(const rootsys::RootSystem& rs, double t, double rel_tol) {
    HeatTraceOptions opt;
    opt.rel_tol = rel_tol;
    return heat_trace_shifted(rs, t, opt);
}

/// I(t) = vol(T)^2 / ((2 pi)^r vol(G)) * prod <alpha,rho>^{-2} * (pi/t)^{n/2},
/// evaluated in log space.
inline double closed_form_I(const rootsys::RootSystem& rs, double t) {
    if (!(t > 0)) throw std::invalid_argument("closed_form_I: t must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    double log_det = 0;
    for (const auto& d : rs.gram_udut.d) log_det += std::log(to_double(d));
    const double log_vol_t = double(rs.r) * std::log(two_pi) - 0.5 * log_det;
    const double log_vol_g =
        double(rs.m) * std::log(two_pi) - rs.log_rho_product_d + log_vol_t;
    double lg = 2.0 * log_vol_t - double(rs.r) * std::log(two_pi) - log_vol_g -
                2.0 * rs.log_rho_product_d +
                double(rs.n) / 2.0 * (std::log(std::numbers::pi) - std::log(t));
    return std::exp(lg);
}

/// Independent evaluation of I(t) = (1/|W|)(1/vol(P)) int d(lambda)^2
/// e^{-t|lambda|^2} d lambda by exact rational moment integration: the
/// squared root-pairing product is expanded as a polynomial in coordinates
/// that diagonalize the Gram matrix, and each monomial integrates to a
/// rational multiple of pi^{r/2} t^{-n/2}. Everything stays exact until the
/// final conversion.
inline double gaussian_moment_I(const rootsys::RootSystem& rs, double t) {
    if (!(t > 0)) throw std::invalid_argument("gaussian_moment_I: t must be positive");
    if (rs.r > 3 || 2 * rs.m > 20)
        throw std::domain_error("gaussian_moment_I: scope exceeded (rank <= 3, 2m <= 20)");
    RatLDL f = rat_ldlt(rs.gram_weights);  // G = L D L^T, z = L^T x

    // Linear forms <alpha_k, lambda> = (L^{-1} w_k) . z, exact.
    std::vector<std::vector<Rational>> forms(rs.m, std::vector<Rational>(rs.r));
    for (int k = 0; k < rs.m; ++k) {
        for (int i = 0; i < rs.r; ++i) {
            Rational v = rs.root_pairing(k, i);
            for (int j = 0; j < i; ++j) v -= f.L(i, j) * forms[k][j];
            forms[k][i] = v;
        }
    }

    // Expand prod_k (<alpha_k, lambda>)^2 as a sparse polynomial in z.
    std::map<std::vector<int>, Rational> poly{{std::vector<int>(rs.r, 0), Rational(1)}};
    for (int k = 0; k < rs.m; ++k)
        for (int rep = 0; rep < 2; ++rep) {
            std::map<std::vector<int>, Rational> next;
            for (const auto& [expo, c] : poly)
                for (int i = 0; i < rs.r; ++i) {
                    if (forms[k][i] == 0) continue;
                    std::vector<int> e2 = expo;
                    ++e2[i];
                    next[e2] += c * forms[k][i];
                }
            poly = std::move(next);
        }

    // Gaussian moments: int z^k e^{-t d z^2} dz over R vanishes for odd k and
    // contributes (k-1)!!/2^{k/2} d^{-k/2} * sqrt(pi/t) * t^{-k/2} otherwise;
    // the sqrt(det G) Jacobian cancels the product of sqrt(d_i).
    Rational total = 0;
    for (const auto& [expo, c] : poly) {
        bool odd = false;
        for (int e : expo) odd = odd || (e % 2 != 0);
        if (odd) continue;
        Rational term = c;
        for (int i = 0; i < rs.r; ++i) {
            const int k = expo[i];
            Rational dfact = 1;
            for (int v = k - 1; v >= 2; v -= 2) dfact *= v;
            term *= dfact;
            for (int v = 0; v < k / 2; ++v) term /= 2 * f.d[i];
        }
        total += term;
    }

    Rational exact = total / (rs.rho_pairing_product * rs.rho_pairing_product) /
                     Rational(rs.weyl_order);
    double log_scale = double(rs.r) / 2.0 * std::log(std::numbers::pi) -
                       double(rs.n) / 2.0 * std::log(t);
    return to_double(exact) / volume::weight_covolume(rs) * std::exp(log_scale);
}

inline nlohmann::ordered_json to_json(const HeatTraceSample& s) {
    nlohmann::ordered_json j;
    j["t"] = s.t;
    j["z"] = s.z;
    j["scaled"] = s.scaled;
    j["cutoff_radius"] = s.cutoff_radius;
    j["terms_used"] = s.terms_used;
    j["tail_estimate"] = s.tail_estimate;
    return j;
}

inline std::string samples_to_csv(const std::vector<HeatTraceSample>& samples) {
    std::string out = "t,z,scaled,cutoff_radius,terms_used,tail_estimate\n";
    for (const auto& s : samples) {
        out += format_double(s.t) + "," + format_double(s.z) + "," + format_double(s.scaled) + "," +
               format_double(s.cutoff_radius) + "," + std::to_string(s.terms_used) + "," +
               format_double(s.tail_estimate) + "\n";
    }
    return out;
}

}  // namespace weylvol::heat
