// Euler-Maclaurin machinery: exact Bernoulli numbers, finite and infinite
// expansions with certified remainder bounds, and the asymptotic harness
// for sums of x^{2m} e^{-t(Ax^2+Bx)} against their integrals.
//
// Sign conventions. bernoulli(q) returns the classical B_q (B_1 = -1/2),
// recovered from the Taylor coefficients c_q of Td(x) = x/(1 - e^{-x}) as
// B_q = (-1)^q q! c_q. In both expansions the order-1 boundary correction
// carries weight 1/2 at each endpoint (the endpoint average); for q >= 2
// the weight is B_q/q! and odd orders vanish on their own.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fit.hpp"
#include "rational.hpp"

namespace weylvol::em {

/// Classical Bernoulli number, exact. Cached per thread; q is tiny (the
/// expansions used here never exceed order ~16).
inline Rational bernoulli(int q) {
    if (q < 0) throw std::invalid_argument("bernoulli: q must be nonnegative");
    thread_local std::vector<Rational> cache{Rational(1)};  // c_q coefficients of Td
    thread_local std::vector<Rational> fact{Rational(1)};
    while (int(cache.size()) <= q) {
        int k = int(cache.size());
        while (int(fact.size()) <= k + 1) fact.push_back(fact.back() * int(fact.size()));
        Rational c = 0;
        for (int i = 0; i < k; ++i) {
            Rational g = Rational((k - i) % 2 == 0 ? 1 : -1) / fact[k - i + 1];
            c -= cache[i] * g;
        }
        cache.push_back(c);
    }
    while (int(fact.size()) <= q) fact.push_back(fact.back() * int(fact.size()));
    Rational b = cache[q] * fact[q];
    return q % 2 == 0 ? b : -b;
}

/// zeta(s) for integer s >= 2 through the alternating series with
/// Cohen-Rodriguez Villegas-Zagier acceleration; 32 terms leave the
/// truncation error far below 1e-15.
inline double zeta(int s) {
    if (s < 2) throw std::invalid_argument("zeta: s >= 2 required");
    const int n = 32;
    double d = std::pow(3.0 + 2.0 * std::numbers::sqrt2, n);
    d = (d + 1.0 / d) / 2.0;
    double b = -1.0, c = -d, eta = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        eta += c * std::pow(double(k + 1), -double(s));
        b *= double(k + n) * double(k - n) / ((k + 0.5) * (k + 1.0));
    }
    eta /= d;
    return eta / (1.0 - std::pow(2.0, 1.0 - double(s)));
}

/// |truncation| <= rem_factor(N) * int |f^(N)|. For N >= 2 this is the
/// periodized-Bernoulli bound 2 zeta(N)/(2 pi)^N; for N = 1 the sharp
/// classical constant 1/2 replaces the divergent zeta(1).
inline double rem_factor(int N) {
    if (N < 1) throw std::invalid_argument("rem_factor: order must be >= 1");
    if (N == 1) return 0.5;
    return 2.0 * zeta(N) / std::pow(2.0 * std::numbers::pi, N);
}

struct EMExpansion {
    double integral = 0;
    std::vector<double> corrections;  // order q stored at index q-1
    double remainder_bound = 0;
    double value = 0;  // integral + sum of corrections
};

/// Caller-supplied smooth summand with symbolic derivatives.
///   deriv(q, x)               = f^(q)(x), q = 0 is f itself
///   integral(n)               = int_0^n f, n may be +infinity
///   abs_deriv_integral(N, n)  = int_0^n |f^(N)| or an upper bound for it
struct SmoothFn {
    std::function<double(int, double)> deriv;
    std::function<double(double)> integral;
    std::function<double(int, double)> abs_deriv_integral;
};

namespace detail {

inline double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("euler-maclaurin: non-finite ") + what);
    return v;
}

}  // namespace detail

/// Sum_{x=0}^{n} f(x) as integral + boundary corrections + bounded remainder.
inline EMExpansion em_finite(const SmoothFn& f, std::int64_t n, int N) {
    if (N < 1) throw std::invalid_argument("em_finite: order must be >= 1");
    if (n < 0) throw std::invalid_argument("em_finite: n must be nonnegative");
    const double nd = double(n);
    EMExpansion e;
    e.integral = detail::checked(f.integral(nd), "integral");
    e.corrections.resize(N, 0.0);
    e.corrections[0] = (f.deriv(0, 0.0) + f.deriv(0, nd)) / 2.0;
    for (int q = 2; q <= N; ++q) {
        double coeff = to_double(bernoulli(q)) / std::tgamma(double(q) + 1.0);
        if (coeff != 0.0) e.corrections[q - 1] = coeff * (f.deriv(q - 1, nd) - f.deriv(q - 1, 0.0));
    }
    double bound_int = detail::checked(f.abs_deriv_integral(N, nd), "derivative integral bound");
    e.remainder_bound = bound_int == 0.0 ? 0.0 : rem_factor(N) * bound_int;
    e.value = e.integral;
    for (double c : e.corrections) e.value += c;
    return e;
}

/// Sum_{x=0}^{infinity} f(x); requires all derivatives to vanish at infinity.
inline EMExpansion em_infinite(const SmoothFn& f, int N) {
    if (N < 1) throw std::invalid_argument("em_infinite: order must be >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    EMExpansion e;
    e.integral = detail::checked(f.integral(inf), "integral");
    e.corrections.resize(N, 0.0);
    e.corrections[0] = f.deriv(0, 0.0) / 2.0;
    for (int q = 2; q <= N; ++q) {
        double coeff = to_double(bernoulli(q)) / std::tgamma(double(q) + 1.0);
        if (coeff != 0.0) e.corrections[q - 1] = -coeff * f.deriv(q - 1, 0.0);
    }
    double bound_int = detail::checked(f.abs_deriv_integral(N, inf), "derivative integral bound");
    e.remainder_bound = bound_int == 0.0 ? 0.0 : rem_factor(N) * bound_int;
    e.value = e.integral;
    for (double c : e.corrections) e.value += c;
    return e;
}

// ---------------------------------------------------------------------------
// Polynomial summands (exact path).

inline std::vector<Rational> poly_derivative(const std::vector<Rational>& p) {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * int(k));
    return d;
}

inline Rational poly_eval(const std::vector<Rational>& p, const Rational& x) {
    Rational acc = 0;
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
    return acc;
}

struct ExactExpansion {
    Rational value{0};
    bool remainder_zero = false;  // true when N exceeds the degree
};

/// Fully rational finite expansion for a polynomial summand: with N above
/// the degree the remainder vanishes identically and `value` equals
/// Sum_{x=0}^{n} p(x) exactly.
inline ExactExpansion em_finite_poly_exact(const std::vector<Rational>& p, std::int64_t n, int N) {
    if (N < 1) throw std::invalid_argument("em_finite_poly_exact: order must be >= 1");
    if (n < 0) throw std::invalid_argument("em_finite_poly_exact: n must be nonnegative");
    int degree = -1;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] != 0) degree = int(k);
    Rational nr(n);
    ExactExpansion out;
    Rational integral = 0;  // int_0^n p, exact antiderivative
    Rational npow = nr;     // n^{k+1}
    for (std::size_t k = 0; k < p.size(); ++k) {
        integral += p[k] * npow / int(k + 1);
        npow *= nr;
    }
    out.value = integral + (poly_eval(p, 0) + poly_eval(p, nr)) / 2;
    std::vector<Rational> d = poly_derivative(p);
    Rational qfact = 1;
    for (int q = 2; q <= N; ++q) {
        qfact *= q;
        Rational b = bernoulli(q);
        if (b != 0) out.value += b / qfact * (poly_eval(d, nr) - poly_eval(d, 0));
        d = poly_derivative(d);
    }
    out.remainder_zero = degree < N;
    return out;
}

/// SmoothFn wrapper for a polynomial (floating-point mirror of the exact
/// path; derivatives by coefficient shifts, never finite differences).
inline SmoothFn make_polynomial_fn(const std::vector<double>& coeffs) {
    auto deriv_coeffs = [coeffs](int q) {
        std::vector<double> p = coeffs;
        for (int it = 0; it < q; ++it) {
            std::vector<double> d;
            for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * double(k));
            p = std::move(d);
        }
        return p;
    };
    SmoothFn f;
    f.deriv = [deriv_coeffs](int q, double x) {
        std::vector<double> p = deriv_coeffs(q);
        double acc = 0;
        for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
        return acc;
    };
    f.integral = [coeffs](double n) {
        double acc = 0, p = n;  // p = n^{k+1}
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            acc += coeffs[k] * p / (double(k) + 1.0);
            p *= n;
        }
        return acc;
    };
    f.abs_deriv_integral = [deriv_coeffs](int N, double n) {
        std::vector<double> p = deriv_coeffs(N);
        bool zero = true;
        for (double c : p) zero = zero && c == 0.0;
        if (zero) return 0.0;
        double acc = 0, x = n;  // upper bound: sum |c_k| n^{k+1}/(k+1)
        for (std::size_t k = 0; k < p.size(); ++k) {
            acc += std::abs(p[k]) * x / (double(k) + 1.0);
            x *= n;
        }
        return acc;
    };
    return f;
}

// ---------------------------------------------------------------------------
// Gaussian-polynomial summands p(x) e^{-t(Ax^2+Bx)}.

namespace detail {

template <class Real>
Real binomial(int n, int k) {
    Real acc = 1;
    for (int i = 1; i <= k; ++i) acc = acc * Real(n - k + i) / Real(i);
    return acc;
}

/// int_0^infinity x^k e^{-(a x^2 + b x)} dx for a > 0 (any b) or a = 0, b > 0.
/// Complete the square and reduce to incomplete even moments by the
/// integration-by-parts recurrence G_j = (j-1)/(2a) G_{j-2} + c^{j-1} E/(2a).
template <class Real>
Real gauss_moment(int k, Real a, Real b) {
    using std::erfc;
    using std::exp;
    using std::sqrt;
    if (k < 0) throw std::invalid_argument("gauss_moment: negative power");
    if (a == Real(0)) {
        if (b <= Real(0)) throw std::invalid_argument("gauss_moment: divergent integral");
        Real acc = 1 / b;  // k!/b^{k+1}
        for (int i = 1; i <= k; ++i) acc = acc * Real(i) / b;
        return acc;
    }
    if (a < Real(0)) throw std::invalid_argument("gauss_moment: divergent integral");
    const Real c = b / (2 * a);
    const Real sa = sqrt(a);
    const Real E = exp(-a * c * c);
    std::vector<Real> G(std::size_t(k) + 1);
    G[0] = sqrt(std::numbers::pi_v<Real> / a) / 2 * erfc(c * sa);
    if (k >= 1) G[1] = E / (2 * a);
    Real cpow = c;  // c^{j-1}
    for (int j = 2; j <= k; ++j) {
        G[j] = Real(j - 1) / (2 * a) * G[j - 2] + cpow * E / (2 * a);
        cpow *= c;
    }
    // int_0^inf x^k e^{-a(x+c)^2} dx = sum_j C(k,j) (-c)^{k-j} G_j
    Real acc = 0, mc = 1;  // (-c)^{k-j}, built from j = k downward
    for (int j = k; j >= 0; --j) {
        acc += binomial<Real>(k, j) * mc * G[std::size_t(j)];
        mc *= -c;
    }
    return acc / E;  // the completed square contributes e^{+ac^2}
}

template <class Real>
std::vector<Real> gauss_poly_derivative(const std::vector<Real>& p, Real tA, Real tB) {
    // (p e^{-(tA x^2 + tB x)})' = (p' - (2 tA x + tB) p) e^{...}
    std::vector<Real> out(p.size() + 1, Real(0));
    for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] += Real(k) * p[k];
    for (std::size_t k = 0; k < p.size(); ++k) {
        out[k + 1] -= 2 * tA * p[k];
        out[k] -= tB * p[k];
    }
    while (!out.empty() && out.back() == Real(0)) out.pop_back();
    return out;
}

}  // namespace detail

/// f(x) = p(x) e^{-t(Ax^2+Bx)} with symbolic derivatives and closed-form
/// moment integrals. Requires A > 0, or A = 0 with B > 0, so that all
/// integrals over [0, infinity) converge. abs_deriv_integral bounds
/// int |f^(N)| by summing |coefficient| x^k moments.
inline SmoothFn make_gauss_poly_fn(const std::vector<double>& poly, double A, double B, double t) {
    if (!(t > 0)) throw std::invalid_argument("make_gauss_poly_fn: t must be positive");
    if (A < 0 || (A == 0 && B <= 0)) throw std::invalid_argument("make_gauss_poly_fn: divergent profile");
    const double a = t * A, b = t * B;
    auto nth_poly = [poly, a, b](int q) {
        std::vector<double> p = poly;
        for (int i = 0; i < q; ++i) p = detail::gauss_poly_derivative(p, a, b);
        return p;
    };
    SmoothFn f;
    f.deriv = [nth_poly, a, b](int q, double x) {
        std::vector<double> p = nth_poly(q);
        double acc = 0;
        for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
        return acc * std::exp(-(a * x + b) * x);
    };
    f.integral = [poly, a, b](double n) {
        if (!std::isinf(n)) throw std::invalid_argument("gauss-poly integral: only the infinite form is provided");
        double acc = 0;
        for (std::size_t k = 0; k < poly.size(); ++k)
            if (poly[k] != 0) acc += poly[k] * detail::gauss_moment<double>(int(k), a, b);
        return acc;
    };
    f.abs_deriv_integral = [nth_poly, a, b](int N, double n) {
        if (!std::isinf(n)) throw std::invalid_argument("gauss-poly integral: only the infinite form is provided");
        std::vector<double> p = nth_poly(N);
        double acc = 0;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (p[k] != 0) acc += std::abs(p[k]) * detail::gauss_moment<double>(int(k), a, b);
        return acc;
    };
    return f;
}

// ---------------------------------------------------------------------------
// Asymptotic harness for S(t) = sum_{x>=0} x^{2m} e^{-t(Ax^2+Bx)}.
// Internals run in long double: the interesting residuals S - I sit many
// orders below S itself and double precision would drown them.

/// Direct summation, compensated, with the cutoff term < 1e-18 * partial
/// and a floor of 10/sqrt(tA) terms so certified tails are ~e^{-100}.
inline double lemma1_sum(double A, double B, int m, double t) {
    if (!(A > 0) || !(t > 0)) throw std::invalid_argument("lemma1_sum: A > 0 and t > 0 required");
    if (m < 0) throw std::invalid_argument("lemma1_sum: m must be nonnegative");
    const long double a = (long double)(t) * A, b = (long double)(t) * B;
    const std::int64_t floor_terms = std::int64_t(std::ceil(10.0 / std::sqrt(t * A)));
    long double sum = 0, comp = 0, prev = std::numeric_limits<long double>::infinity();
    for (std::int64_t x = 0;; ++x) {
        long double xl = (long double)(x);
        long double term = std::exp(-(a * xl + b) * xl);
        for (int i = 0; i < 2 * m; ++i) term *= xl;
        long double s = sum + term;  // Neumaier step
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - s) + term;
        else
            comp += (term - s) + sum;
        sum = s;
        if (x >= floor_terms && term <= prev &&
            (term == 0 || term < 1e-18L * std::abs(sum + comp)))
            break;
        prev = term;
    }
    return double(sum + comp);
}

/// int_0^infinity x^{2m} e^{-t(Ax^2+Bx)} dx by the moment recurrence.
inline double lemma1_integral(double A, double B, int m, double t) {
    if (!(A > 0) || !(t > 0)) throw std::invalid_argument("lemma1_integral: A > 0 and t > 0 required");
    return double(detail::gauss_moment<long double>(2 * m, (long double)(t) * A, (long double)(t) * B));
}

/// Fitted exponent of the scaled residual t^{m+1/2} (S(t) - I(t)) over a
/// decreasing grid. Residuals at the long double noise floor are treated as
/// exact zeros; an identically-zero residual reports +infinity (every
/// boundary correction of an even integrand cancels, so nothing remains to
/// fit a slope to).
inline double lemma1_residual_slope(double A, double B, int m, const std::vector<double>& t_grid) {
    if (t_grid.size() < 6) throw std::invalid_argument("lemma1_residual_slope: need at least 6 grid points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0)) throw std::invalid_argument("lemma1_residual_slope: grid must be positive");
        if (i && !(t_grid[i] < t_grid[i - 1]))
            throw std::invalid_argument("lemma1_residual_slope: grid must be strictly decreasing");
    }
    std::vector<double> lt, lr;
    for (double t : t_grid) {
        const long double S = (long double)(lemma1_sum(A, B, m, t));
        const long double I = (long double)(lemma1_integral(A, B, m, t));
        const long double noise =
            64 * std::numeric_limits<long double>::epsilon() * (std::abs(S) + std::abs(I));
        const long double resid = std::abs(S - I);
        if (resid <= noise) continue;
        long double scaled = std::pow((long double)(t), (long double)(m) + 0.5L) * resid;
        lt.push_back(std::log(t));
        lr.push_back(double(std::log(scaled)));
    }
    if (lt.size() < 3) return std::numeric_limits<double>::infinity();
    return fit_affine(lt, lr).slope;
}

}  // namespace weylvol::em
