// Exact root-system data for compact semisimple simply connected groups.
//
// Conventions, fixed once here and relied on everywhere else:
//   * weights are integer vectors in the fundamental-weight basis, so the
//     dominant cone is exactly the nonnegative orthant;
//   * roots are stored in the simple-root basis; the i-th simple root has
//     fundamental-weight coordinates equal to row i of the Cartan matrix;
//   * the inner product on t* makes long roots of each simple factor have
//     squared length 2, times a per-factor rational scale.
// Under these choices every pairing <alpha, lambda> is rational and the
// Gram matrix of the fundamental weights is D C^{-T} with D = diag(a_i/2),
// a_i = <alpha_i, alpha_i>.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rational.hpp"
#include "rational_linalg.hpp"

namespace weylvol::rootsys {

using WeightCoords = std::vector<std::int64_t>;  // fundamental-weight basis
using RootCoords = std::vector<std::int64_t>;    // simple-root basis
using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct Factor {
    char series = 'A';  // one of A B C D E F G
    int rank = 0;
    Rational scale{1};
};

/// Group description: either a list of classical/exceptional factors or an
/// explicit Cartan matrix (validated for finite type at build time).
struct RootSystemSpec {
    std::vector<Factor> factors;
    IntMatrix cartan;              // explicit path when nonempty
    std::vector<Rational> scales;  // explicit path: one per component (or one broadcast)

    bool has_explicit_cartan() const { return !cartan.empty(); }
};

namespace detail {

inline void validate_series_rank(char s, int r) {
    bool ok = false;
    switch (s) {
        case 'A': case 'B': case 'C': ok = r >= 1; break;
        case 'D': ok = r >= 2; break;
        case 'E': ok = r >= 6 && r <= 8; break;
        case 'F': ok = r == 4; break;
        case 'G': ok = r == 2; break;
        default: ok = false;
    }
    if (!ok)
        throw std::invalid_argument(std::string("invalid series/rank: ") + s + std::to_string(r));
}

inline IntMatrix series_cartan(char s, int r) {
    IntMatrix c(r, std::vector<std::int64_t>(r, 0));
    for (int i = 0; i < r; ++i) c[i][i] = 2;
    auto link = [&](int i, int j) { c[i][j] = -1; c[j][i] = -1; };
    switch (s) {
        case 'A': case 'B': case 'C':
            for (int i = 0; i + 1 < r; ++i) link(i, i + 1);
            if (s == 'B' && r >= 2) c[r - 2][r - 1] = -2;
            if (s == 'C' && r >= 2) c[r - 1][r - 2] = -2;
            break;
        case 'D':
            for (int i = 0; i + 2 < r; ++i) link(i, i + 1);
            if (r >= 3) link(r - 3, r - 1);
            break;
        case 'E':
            link(0, 2);
            link(1, 3);
            link(2, 3);
            for (int i = 3; i + 1 < r; ++i) link(i, i + 1);
            break;
        case 'F':
            link(0, 1);
            link(1, 2);
            link(2, 3);
            c[1][2] = -2;
            break;
        case 'G':
            c[0][1] = -1;
            c[1][0] = -3;
            break;
    }
    return c;
}

/// Squared lengths of the simple roots, normalized so long roots get 2.
inline std::vector<Rational> series_norm2(char s, int r) {
    std::vector<Rational> a(r, Rational(2));
    if (r >= 2) {
        if (s == 'B') a[r - 1] = 1;
        if (s == 'C')
            for (int i = 0; i + 1 < r; ++i) a[i] = 1;
        if (s == 'F') { a[2] = 1; a[3] = 1; }
        if (s == 'G') a[0] = Rational(2, 3);
    }
    return a;
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline BigInt series_weyl_order(char s, int r) {
    BigInt two = 2;
    switch (s) {
        case 'A': return factorial(r + 1);
        case 'B': case 'C': return boost::multiprecision::pow(two, unsigned(r)) * factorial(r);
        case 'D': return boost::multiprecision::pow(two, unsigned(r - 1)) * factorial(r);
        case 'E': return r == 6 ? BigInt(51840) : r == 7 ? BigInt(2903040) : BigInt(696729600);
        case 'F': return BigInt(1152);
        case 'G': return BigInt(12);
    }
    throw std::logic_error("series_weyl_order: unreachable");
}

/// Closure of the simple roots under root-chain addition. beta + alpha_i is
/// a root iff the chain-down length p satisfies p - <beta, alpha_i^vee> >= 1.
inline std::vector<RootCoords> enumerate_positive_roots(const IntMatrix& cartan) {
    const int r = int(cartan.size());
    std::set<RootCoords> known;
    std::vector<RootCoords> frontier;
    for (int i = 0; i < r; ++i) {
        RootCoords e(r, 0);
        e[i] = 1;
        known.insert(e);
        frontier.push_back(e);
    }
    while (!frontier.empty()) {
        std::vector<RootCoords> next;
        for (const auto& beta : frontier) {
            for (int i = 0; i < r; ++i) {
                std::int64_t pair = 0;  // <beta, alpha_i^vee> = sum_j beta_j C_ji
                for (int j = 0; j < r; ++j) pair += beta[j] * cartan[j][i];
                std::int64_t p = 0;
                RootCoords down = beta;
                for (;;) {
                    down[i] -= 1;
                    if (down[i] < 0 || !known.count(down)) break;
                    ++p;
                }
                if (p - pair < 1) continue;
                RootCoords up = beta;
                up[i] += 1;
                if (known.insert(up).second) next.push_back(up);
            }
        }
        frontier = std::move(next);
    }
    std::vector<RootCoords> out(known.begin(), known.end());
    std::sort(out.begin(), out.end(), [](const RootCoords& x, const RootCoords& y) {
        std::int64_t hx = 0, hy = 0;
        for (auto v : x) hx += v;
        for (auto v : y) hy += v;
        if (hx != hy) return hx < hy;
        return x < y;
    });
    return out;
}

struct Component {
    std::vector<int> nodes;
    char series = 'A';
    int rank = 0;
};

inline std::vector<std::vector<int>> connected_components(const IntMatrix& c) {
    const int r = int(c.size());
    std::vector<int> comp(r, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < r; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> nodes;
        std::queue<int> q;
        q.push(s);
        comp[s] = int(out.size());
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            nodes.push_back(i);
            for (int j = 0; j < r; ++j)
                if (j != i && c[i][j] != 0 && comp[j] < 0) {
                    comp[j] = int(out.size());
                    q.push(j);
                }
        }
        std::sort(nodes.begin(), nodes.end());
        out.push_back(std::move(nodes));
    }
    return out;
}

/// Identifies the series of one connected finite-type diagram. Only called
/// after the positive-definiteness check, so failures indicate a matrix
/// that is symmetrizable and definite yet matches no finite diagram, which
/// cannot happen; the throws are defensive.
inline std::pair<char, int> classify_component(const IntMatrix& c, const std::vector<int>& nodes,
                                               const std::vector<Rational>& norm2) {
    const int k = int(nodes.size());
    auto reject = [] { throw std::invalid_argument("Cartan matrix is not of finite type"); };
    if (k == 1) return {'A', 1};
    std::map<int, int> local;
    for (int i = 0; i < k; ++i) local[nodes[i]] = i;
    std::vector<std::vector<int>> adj(k);
    int edges = 0, doubles = 0, triples = 0;
    std::pair<int, int> double_edge{-1, -1};
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            std::int64_t prod = c[nodes[a]][nodes[b]] * c[nodes[b]][nodes[a]];
            if (prod == 0) continue;
            if (prod > 3) reject();
            adj[a].push_back(b);
            adj[b].push_back(a);
            ++edges;
            if (prod == 2) { ++doubles; double_edge = {a, b}; }
            if (prod == 3) ++triples;
        }
    if (edges != k - 1) reject();  // finite diagrams are trees
    for (int a = 0; a < k; ++a)
        if (adj[a].size() > 3) reject();
    if (triples > 0) {
        if (k != 2 || triples != 1) reject();
        return {'G', 2};
    }
    if (doubles > 1) reject();
    if (doubles == 1) {
        for (int a = 0; a < k; ++a)
            if (adj[a].size() > 2) reject();  // path required
        auto [u, v] = double_edge;
        bool u_end = adj[u].size() == 1, v_end = adj[v].size() == 1;
        if (k == 2) return {'B', 2};
        if (!u_end && !v_end) {
            if (k != 4) reject();
            return {'F', 4};
        }
        // end node beyond the double edge short => B, long => C
        int end = u_end ? u : v;
        int other = u_end ? v : u;
        return {norm2[nodes[end]] < norm2[nodes[other]] ? 'B' : 'C', k};
    }
    // simply laced tree
    std::vector<int> branch;
    for (int a = 0; a < k; ++a)
        if (adj[a].size() == 3) branch.push_back(a);
    if (branch.empty()) return {'A', k};
    if (branch.size() > 1) reject();
    int b0 = branch[0];
    std::vector<int> arms;
    for (int s0 : adj[b0]) {
        int len = 1, prev = b0, cur = s0;
        for (;;) {
            int nxt = -1;
            for (int w : adj[cur])
                if (w != prev) nxt = w;
            if (nxt < 0) break;
            prev = cur;
            cur = nxt;
            ++len;
        }
        arms.push_back(len);
    }
    std::sort(arms.begin(), arms.end());
    if (arms[0] != 1) reject();
    if (arms[1] == 1) return {'D', k};
    if (arms[1] != 2) reject();
    if (arms[2] >= 2 && arms[2] <= 4) return {'E', k};
    reject();
    return {'A', 0};  // unreachable
}

}  // namespace detail

/// Parses "A2", "B2xG2", "A1x A1", ... Whitespace is ignored; factors are
/// separated by 'x'.
inline RootSystemSpec parse_group_spec(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty group spec");
    RootSystemSpec spec;
    std::size_t pos = 0;
    while (pos < s.size()) {
        char series = char(std::toupper(static_cast<unsigned char>(s[pos])));
        if (series < 'A' || series > 'G')
            throw std::invalid_argument("invalid group spec '" + text + "': bad series letter");
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos)
            throw std::invalid_argument("invalid group spec '" + text + "': missing rank");
        int rank = 0;
        try {
            rank = std::stoi(s.substr(start, pos - start));
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("invalid group spec '" + text + "': rank out of range");
        }
        detail::validate_series_rank(series, rank);
        spec.factors.push_back({series, rank, Rational(1)});
        if (pos < s.size()) {
            if (s[pos] != 'x' && s[pos] != 'X')
                throw std::invalid_argument("invalid group spec '" + text + "': expected 'x' separator");
            ++pos;
            if (pos == s.size())
                throw std::invalid_argument("invalid group spec '" + text + "': trailing separator");
        }
    }
    return spec;
}

/// Document layout: {"cartan": [[...], ...], "scale": [s1, ...]} with scale
/// entries either numbers or "p/q" strings, one per irreducible component
/// (a single entry broadcasts).
inline RootSystemSpec spec_from_cartan_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("cartan"))
        throw std::invalid_argument("Cartan document must be an object with a \"cartan\" key");
    const auto& cj = doc.at("cartan");
    if (!cj.is_array() || cj.empty())
        throw std::invalid_argument("\"cartan\" must be a nonempty array of rows");
    RootSystemSpec spec;
    const std::size_t r = cj.size();
    for (const auto& row : cj) {
        if (!row.is_array() || row.size() != r)
            throw std::invalid_argument("\"cartan\" must be square");
        std::vector<std::int64_t> out;
        for (const auto& v : row) {
            if (!v.is_number_integer())
                throw std::invalid_argument("\"cartan\" entries must be integers");
            out.push_back(v.get<std::int64_t>());
        }
        spec.cartan.push_back(std::move(out));
    }
    if (doc.contains("scale")) {
        const auto& sj = doc.at("scale");
        if (!sj.is_array()) throw std::invalid_argument("\"scale\" must be an array");
        for (const auto& v : sj) {
            Rational s;
            if (v.is_string())
                s = parse_rational(v.get<std::string>());
            else if (v.is_number_integer())
                s = Rational(v.get<std::int64_t>());
            else if (v.is_number_float())
                s = rational_from_double(v.get<double>());
            else
                throw std::invalid_argument("\"scale\" entries must be numbers or \"p/q\" strings");
            if (s <= 0) throw std::invalid_argument("scale must be positive");
            spec.scales.push_back(s);
        }
    }
    return spec;
}

struct RootSystem {
    int r = 0;  // rank = dim T
    int m = 0;  // |Phi^+|
    int n = 0;  // dim G = r + 2m
    IntMatrix cartan;
    std::vector<RootCoords> positive_roots;  // height-then-lex order
    std::vector<Rational> simple_norm2;      // a_i = <alpha_i, alpha_i>
    RatMatrix gram_weights;                  // <lambda_i, lambda_j>
    WeightCoords rho;                        // (1, ..., 1)
    BigInt weyl_order;
    std::string name;
    std::vector<std::string> component_names;
    std::vector<Rational> component_scales;

    // derived exact caches
    RatMatrix root_pairing;              // (k, j) -> <alpha_k, lambda_j>
    std::vector<Rational> rho_pairings;  // <alpha_k, rho>
    Rational rho_pairing_product;        // prod_k <alpha_k, rho>
    Rational rho_norm2;
    RatLDL gram_udut;  // gram_weights = U diag(d) U^T, U unit upper

    // float mirrors for enumeration and heat-trace inner loops
    std::vector<std::vector<double>> root_pairing_d;
    std::vector<double> rho_pairings_d;
    std::vector<double> udut_diag_d;
    std::vector<std::vector<double>> udut_coef_d;  // row k holds U^T coefficients for j < k
    double rho_norm_d = 0;
    double log_rho_product_d = 0;
    double max_weight_norm_d = 0;  // max_i |lambda_i|
    double sum_weight_norm_d = 0;  // sum_i |lambda_i|

    WeightCoords simple_root_weight_coords(int i) const {
        return WeightCoords(cartan[i].begin(), cartan[i].end());
    }
};

inline Rational inner(const RootSystem& rs, const std::vector<Rational>& u, const std::vector<Rational>& v) {
    if (int(u.size()) != rs.r || int(v.size()) != rs.r)
        throw std::invalid_argument("inner: wrong coordinate count");
    Rational acc = 0;
    for (int i = 0; i < rs.r; ++i) {
        if (u[i] == 0) continue;
        Rational row = 0;
        for (int j = 0; j < rs.r; ++j) row += rs.gram_weights(i, j) * v[j];
        acc += u[i] * row;
    }
    return acc;
}

inline std::vector<Rational> to_rational_coords(const WeightCoords& x) {
    return std::vector<Rational>(x.begin(), x.end());
}

inline Rational inner(const RootSystem& rs, const WeightCoords& u, const WeightCoords& v) {
    return inner(rs, to_rational_coords(u), to_rational_coords(v));
}

inline Rational norm2(const RootSystem& rs, const WeightCoords& u) { return inner(rs, u, u); }

/// <alpha_k, lambda> for the k-th positive root and a weight in fw coords.
inline Rational pairing_with_root(const RootSystem& rs, int k, const WeightCoords& lambda) {
    Rational acc = 0;
    for (int j = 0; j < rs.r; ++j) acc += rs.root_pairing(k, j) * lambda[j];
    return acc;
}

/// dim V_lambda = prod <alpha, lambda + rho> / prod <alpha, rho>, exact.
inline BigInt weyl_dim(const RootSystem& rs, const WeightCoords& lambda) {
    if (int(lambda.size()) != rs.r) throw std::invalid_argument("weyl_dim: wrong coordinate count");
    for (auto x : lambda)
        if (x < 0) throw std::invalid_argument("weyl_dim: weight must be dominant");
    Rational num = 1;
    for (int k = 0; k < rs.m; ++k) {
        Rational p = rs.rho_pairings[k];
        for (int j = 0; j < rs.r; ++j) p += rs.root_pairing(k, j) * lambda[j];
        num *= p;
    }
    Rational dim = num / rs.rho_pairing_product;
    if (denominator(dim) != 1) throw std::logic_error("weyl_dim: non-integer result");
    return numerator(dim);
}

/// Casimir eigenvalue on V_lambda: -<lambda, lambda + 2 rho> = |rho|^2 - |lambda+rho|^2.
inline Rational casimir(const RootSystem& rs, const WeightCoords& lambda) {
    std::vector<Rational> lam = to_rational_coords(lambda);
    std::vector<Rational> shifted(rs.r);
    for (int i = 0; i < rs.r; ++i) shifted[i] = lam[i] + 2;
    return -inner(rs, lam, shifted);
}

inline BigInt weyl_group_order(const RootSystem& rs) { return rs.weyl_order; }

/// s_i(x) = x - <x, alpha_i^vee> alpha_i; in fw coords the coefficient is x_i.
inline std::vector<Rational> simple_reflection(const RootSystem& rs, int i, const std::vector<Rational>& x) {
    std::vector<Rational> y = x;
    for (int j = 0; j < rs.r; ++j) y[j] -= x[i] * rs.cartan[i][j];
    return y;
}

inline WeightCoords simple_reflection(const RootSystem& rs, int i, const WeightCoords& x) {
    WeightCoords y = x;
    for (int j = 0; j < rs.r; ++j) y[j] -= x[i] * rs.cartan[i][j];
    return y;
}

/// Restriction of the ball walk: first coordinate confined to [x0_lo, x0_hi]
/// (x0_hi < 0 means unbounded); exact_boundary resolves floating-point
/// near-ties with rational arithmetic so membership is exact.
struct BallSlice {
    double radius = 0;
    std::int64_t x0_lo = 0;
    std::int64_t x0_hi = -1;
    bool exact_boundary = false;
};

namespace detail {

inline Rational exact_norm2(const RootSystem& rs, const WeightCoords& x) {
    Rational acc = 0;
    for (int i = 0; i < rs.r; ++i) {
        if (x[i] == 0) continue;
        Rational row = 0;
        for (int j = 0; j < rs.r; ++j) row += rs.gram_weights(i, j) * x[j];
        acc += x[i] * row;
    }
    return acc;
}

}  // namespace detail

/// Visits every dominant weight with |lambda| <= radius (first coordinate
/// restricted per `slice`) in lexicographic coordinate order. The quadratic
/// form is walked through its U D U^T factorization, so the partial sum at
/// depth k already bounds the final norm and prunes the scan.
template <class Emit>
inline void for_each_dominant_in_ball(const RootSystem& rs, const BallSlice& slice, Emit&& emit) {
    const int r = rs.r;
    const double R2 = slice.radius * slice.radius;
    const double margin = slice.exact_boundary ? 3e-9 : 0.0;
    const double limit2 = R2 * (1.0 + margin);
    const double accept2 = R2 * (1.0 - margin);
    const Rational exact_r2 = slice.exact_boundary
                                  ? Rational(rational_from_double(slice.radius) * rational_from_double(slice.radius))
                                  : Rational(0);

    WeightCoords x(r, 0);
    std::function<void(int, double)> walk = [&](int k, double partial) {
        const double dk = rs.udut_diag_d[k];
        double c = 0;
        for (int j = 0; j < k; ++j) c += rs.udut_coef_d[k][j] * double(x[j]);
        std::int64_t xk = (k == 0) ? slice.x0_lo : 0;
        for (;; ++xk) {
            if (k == 0 && slice.x0_hi >= 0 && xk > slice.x0_hi) break;
            const double lk = double(xk) + c;
            const double s = partial + dk * lk * lk;
            if (s <= limit2) {
                x[k] = xk;
                if (k + 1 == r) {
                    if (!slice.exact_boundary || s <= accept2 ||
                        detail::exact_norm2(rs, x) <= exact_r2)
                        emit(const_cast<const WeightCoords&>(x));
                } else {
                    walk(k + 1, s);
                }
            } else if (lk >= 0) {
                break;
            }
        }
        x[k] = 0;
    };
    if (r > 0 && slice.radius >= 0) walk(0, 0.0);
}

/// Largest feasible first coordinate for the given radius; used to carve the
/// walk into disjoint slices for parallel evaluation.
inline std::int64_t first_coord_bound(const RootSystem& rs, double radius) {
    double d0 = rs.udut_diag_d[0];
    return std::int64_t(std::floor(radius / std::sqrt(d0) * (1.0 + 1e-9)));
}

/// All dominant weights with |lambda| <= radius, lexicographic order.
/// Floating-point prefilter, exact rational confirmation at the boundary.
inline std::vector<WeightCoords> dominant_weights_within(const RootSystem& rs, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("dominant_weights_within: radius must be positive");
    std::vector<WeightCoords> out;
    BallSlice slice;
    slice.radius = radius;
    slice.exact_boundary = true;
    for_each_dominant_in_ball(rs, slice, [&](const WeightCoords& w) { out.push_back(w); });
    return out;
}

inline RootSystem build_root_system(const RootSystemSpec& spec) {
    RootSystem rs;

    // Assemble the Cartan matrix, simple-root lengths, and component metadata.
    if (spec.has_explicit_cartan()) {
        const int r = int(spec.cartan.size());
        for (int i = 0; i < r; ++i) {
            if (int(spec.cartan[i].size()) != r)
                throw std::invalid_argument("Cartan matrix must be square");
            if (spec.cartan[i][i] != 2)
                throw std::invalid_argument("Cartan matrix diagonal must be 2");
            for (int j = 0; j < r; ++j) {
                if (i == j) continue;
                if (spec.cartan[i][j] > 0)
                    throw std::invalid_argument("Cartan matrix off-diagonal entries must be <= 0");
                if ((spec.cartan[i][j] == 0) != (spec.cartan[j][i] == 0))
                    throw std::invalid_argument("Cartan matrix zero pattern must be symmetric");
            }
        }
        rs.cartan = spec.cartan;
        rs.r = r;

        auto comps = detail::connected_components(rs.cartan);
        if (!spec.scales.empty() && spec.scales.size() != 1 && spec.scales.size() != comps.size())
            throw std::invalid_argument("scale list must have one entry per irreducible component");

        // Symmetrize: a_j / a_i = C_ji / C_ij along every edge.
        std::vector<Rational> a(r, Rational(0));
        for (std::size_t ci = 0; ci < comps.size(); ++ci) {
            const auto& nodes = comps[ci];
            std::queue<int> q;
            a[nodes[0]] = 1;
            q.push(nodes[0]);
            while (!q.empty()) {
                int i = q.front();
                q.pop();
                for (int j = 0; j < r; ++j) {
                    if (j == i || rs.cartan[i][j] == 0 || a[j] != 0) continue;
                    a[j] = a[i] * Rational(rs.cartan[j][i]) / Rational(rs.cartan[i][j]);
                    q.push(j);
                }
            }
            Rational maxa = 0;
            for (int i : nodes) maxa = std::max(maxa, a[i]);
            Rational scale = spec.scales.empty() ? Rational(1)
                             : spec.scales.size() == 1 ? spec.scales[0]
                                                       : spec.scales[ci];
            if (scale <= 0) throw std::invalid_argument("scale must be positive");
            for (int i : nodes) a[i] = a[i] * 2 * scale / maxa;
            rs.component_scales.push_back(scale);
        }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (Rational(rs.cartan[i][j]) * a[j] != Rational(rs.cartan[j][i]) * a[i])
                    throw std::invalid_argument("Cartan matrix is not symmetrizable");
        rs.simple_norm2 = std::move(a);

        // Positive definiteness of the simple-root Gram decides finite type.
        RatMatrix gs(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) gs(i, j) = Rational(rs.cartan[i][j]) * rs.simple_norm2[j] / 2;
        try {
            rat_ldlt(gs);
        } catch (const std::domain_error&) {
            throw std::invalid_argument("Cartan matrix is not of finite type (not positive definite)");
        }

        rs.weyl_order = 1;
        for (const auto& nodes : comps) {
            auto [series, rank] = detail::classify_component(rs.cartan, nodes, rs.simple_norm2);
            rs.component_names.push_back(std::string(1, series) + std::to_string(rank));
            rs.weyl_order *= detail::series_weyl_order(series, rank);
        }
        rs.name = rs.component_names.empty() ? "" : rs.component_names[0];
        for (std::size_t i = 1; i < rs.component_names.size(); ++i) rs.name += "x" + rs.component_names[i];
    } else {
        if (spec.factors.empty()) throw std::invalid_argument("group spec has no factors");
        int r = 0;
        for (const auto& f : spec.factors) {
            detail::validate_series_rank(f.series, f.rank);
            if (f.scale <= 0) throw std::invalid_argument("scale must be positive");
            r += f.rank;
        }
        rs.r = r;
        rs.cartan.assign(r, std::vector<std::int64_t>(r, 0));
        rs.simple_norm2.assign(r, Rational(0));
        rs.weyl_order = 1;
        int off = 0;
        for (const auto& f : spec.factors) {
            IntMatrix c = detail::series_cartan(f.series, f.rank);
            std::vector<Rational> a = detail::series_norm2(f.series, f.rank);
            for (int i = 0; i < f.rank; ++i) {
                rs.simple_norm2[off + i] = a[i] * f.scale;
                for (int j = 0; j < f.rank; ++j) rs.cartan[off + i][off + j] = c[i][j];
            }
            rs.weyl_order *= detail::series_weyl_order(f.series, f.rank);
            rs.component_names.push_back(std::string(1, f.series) + std::to_string(f.rank));
            rs.component_scales.push_back(f.scale);
            off += f.rank;
        }
        rs.name = rs.component_names[0];
        for (std::size_t i = 1; i < rs.component_names.size(); ++i) rs.name += "x" + rs.component_names[i];
    }

    rs.positive_roots = detail::enumerate_positive_roots(rs.cartan);
    rs.m = int(rs.positive_roots.size());
    rs.n = rs.r + 2 * rs.m;
    rs.rho.assign(rs.r, 1);

    // gram_weights = D C^{-T}, D = diag(a_i / 2).
    RatMatrix c(rs.r, rs.r);
    for (int i = 0; i < rs.r; ++i)
        for (int j = 0; j < rs.r; ++j) c(i, j) = rs.cartan[i][j];
    RatMatrix cinv_t = rat_inverse(c).transposed();
    rs.gram_weights = RatMatrix(rs.r, rs.r);
    for (int i = 0; i < rs.r; ++i)
        for (int j = 0; j < rs.r; ++j) rs.gram_weights(i, j) = rs.simple_norm2[i] / 2 * cinv_t(i, j);
    if (!rs.gram_weights.is_symmetric())
        throw std::logic_error("fundamental-weight Gram matrix is not symmetric");

    // <alpha_k, lambda_j> = c_j a_j / 2 for alpha_k = sum_j c_j alpha_j.
    rs.root_pairing = RatMatrix(rs.m, rs.r);
    rs.rho_pairings.resize(rs.m);
    rs.rho_pairing_product = 1;
    for (int k = 0; k < rs.m; ++k) {
        Rational hk = 0;
        for (int j = 0; j < rs.r; ++j) {
            rs.root_pairing(k, j) = Rational(rs.positive_roots[k][j]) * rs.simple_norm2[j] / 2;
            hk += rs.root_pairing(k, j);
        }
        rs.rho_pairings[k] = hk;
        if (hk <= 0) throw std::logic_error("nonpositive <alpha, rho> pairing");
        rs.rho_pairing_product *= hk;
    }
    rs.rho_norm2 = 0;
    for (int i = 0; i < rs.r; ++i)
        for (int j = 0; j < rs.r; ++j) rs.rho_norm2 += rs.gram_weights(i, j);

    rs.gram_udut = rat_udut(rs.gram_weights);

    // Float mirrors.
    rs.root_pairing_d.assign(rs.m, std::vector<double>(rs.r));
    rs.rho_pairings_d.resize(rs.m);
    for (int k = 0; k < rs.m; ++k) {
        for (int j = 0; j < rs.r; ++j) rs.root_pairing_d[k][j] = to_double(rs.root_pairing(k, j));
        rs.rho_pairings_d[k] = to_double(rs.rho_pairings[k]);
    }
    rs.udut_diag_d.resize(rs.r);
    rs.udut_coef_d.assign(rs.r, {});
    for (int k = 0; k < rs.r; ++k) {
        rs.udut_diag_d[k] = to_double(rs.gram_udut.d[k]);
        rs.udut_coef_d[k].resize(k);
        // q(x) = sum_k d_k (x_k + sum_{j<k} U_jk x_j)^2
        for (int j = 0; j < k; ++j) rs.udut_coef_d[k][j] = to_double(rs.gram_udut.L(j, k));
    }
    rs.rho_norm_d = std::sqrt(to_double(rs.rho_norm2));
    rs.log_rho_product_d = 0;
    for (int k = 0; k < rs.m; ++k) rs.log_rho_product_d += std::log(rs.rho_pairings_d[k]);
    rs.max_weight_norm_d = 0;
    rs.sum_weight_norm_d = 0;
    for (int i = 0; i < rs.r; ++i) {
        double w = std::sqrt(to_double(rs.gram_weights(i, i)));
        rs.max_weight_norm_d = std::max(rs.max_weight_norm_d, w);
        rs.sum_weight_norm_d += w;
    }
    return rs;
}

inline RootSystem build_root_system(const std::string& group) {
    return build_root_system(parse_group_spec(group));
}

}  // namespace weylvol::rootsys
