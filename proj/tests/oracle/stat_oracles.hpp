#pragma once

// Brute-force references for the statistical kernels. Slow on purpose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

/// P(X >= k) with X ~ Bin(n, 1/2), by listing all 2^n outcomes.
inline double sign_upper_enum(int k, int n) {
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
        if (__builtin_popcountll(mask) >= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
}

inline double sign_lower_enum(int k, int n) {
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
        if (__builtin_popcountll(mask) <= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
}

/// U of sample a: pairs (x in a, y in b) with x > y, ties counting one half.
inline double u_pairs(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (const double x : a)
        for (const double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return u;
}

struct MwuEnum {
    double p_greater = 0;  // P(U >= u_obs)
    double p_less = 0;     // P(U <= u_obs)
};

/// Exact null distribution by enumerating every assignment of the pooled
/// values to a group of size |a|.
inline MwuEnum mwu_enum(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const double u_obs = u_pairs(a, b);
    const std::size_t n = pooled.size(), m = a.size();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
    std::uint64_t total = 0, ge = 0, le = 0;
    std::sort(pick.begin(), pick.end());
    do {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
        const double u = u_pairs(x, y);
        ++total;
        if (u >= u_obs - 1e-12) ++ge;
        if (u <= u_obs + 1e-12) ++le;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return {static_cast<double>(ge) / static_cast<double>(total), static_cast<double>(le) / static_cast<double>(total)};
}

/// Student t density.
inline double t_density(double x, double nu) {
    const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * M_PI);
    return c * std::pow(1.0 + x * x / nu, -(nu + 1) / 2);
}

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth = 50) {
    auto s = [&](double lo, double hi) {
        const double mid = (lo + hi) / 2;
        return (hi - lo) / 6 * (f(lo) + 4 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                                          double tol, int d) {
        const double mid = (lo + hi) / 2;
        const double left = s(lo, mid), right = s(mid, hi);
        if (d <= 0 || std::fabs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
        return rec(lo, mid, left, tol / 2, d - 1) + rec(mid, hi, right, tol / 2, d - 1);
    };
    return rec(a, b, s(a, b), eps, depth);
}

/// P(T >= |t|) by quadrature of the density: 1/2 minus the integral over [0, |t|].
inline double t_upper_tail_quadrature(double t, double nu) {
    const double x = std::fabs(t);
    const double body = simpson([&](double u) { return t_density(u, nu); }, 0.0, x, 1e-13);
    const double tail = 0.5 - body;
    return t >= 0 ? tail : 1.0 - tail;
}

/// Least squares by the normal equations X'X b = X'y, Gauss-Jordan with
/// partial pivoting in long double.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const std::size_t p = rows.front().size();
    std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) a[i][j] += static_cast<long double>(rows[r][i]) * rows[r][j];
            a[i][p] += static_cast<long double>(rows[r][i]) * y[r];
        }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> b(p);
    for (std::size_t i = 0; i < p; ++i) b[i] = static_cast<double>(a[i][p] / a[i][i]);
    return b;
}

}  // namespace oracle
