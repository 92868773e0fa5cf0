// Tiny least-squares fits used by the asymptotic checks.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace weylvol {

struct AffineFit {
    double intercept = 0;
    double slope = 0;
};

/// Ordinary least squares for y = intercept + slope * x.
inline AffineFit fit_affine(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_affine: need at least two points");
    const double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("fit_affine: degenerate abscissae");
    AffineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

struct QuadraticFit {
    double c0 = 0, c1 = 0, c2 = 0;
};

/// Least squares for y = c0 + c1 x + c2 x^2 via the 3x3 normal equations.
inline QuadraticFit fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("fit_quadratic: need at least three points");
    double s[5] = {double(xs.size()), 0, 0, 0, 0};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double p = 1;
        for (int k = 1; k <= 4; ++k) {
            p *= xs[i];
            s[k] += p;
        }
        double q = 1;
        for (int k = 0; k < 3; ++k) {
            b[k] += q * ys[i];
            q *= xs[i];
        }
    }
    double a[3][4] = {{s[0], s[1], s[2], b[0]}, {s[1], s[2], s[3], b[1]}, {s[2], s[3], s[4], b[2]}};
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int i = c + 1; i < 3; ++i)
            if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
        for (int j = 0; j < 4; ++j) std::swap(a[p][j], a[c][j]);
        if (a[c][c] == 0) throw std::invalid_argument("fit_quadratic: degenerate abscissae");
        for (int i = 0; i < 3; ++i) {
            if (i == c) continue;
            double f = a[i][c] / a[c][c];
            for (int j = c; j < 4; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

}  // namespace weylvol
