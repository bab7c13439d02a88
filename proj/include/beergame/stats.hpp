#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beergame/errors.hpp"

namespace beergame::stats {

enum class Sided { less, greater, two };

inline std::string_view to_string(Sided s) {
    switch (s) {
        case Sided::less: return "less";
        case Sided::greater: return "greater";
        default: return "two-sided";
    }
}

// ---------------------------------------------------------------- descriptive

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased (n - 1) sample variance.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw DomainError("sample variance needs at least two observations");
    const double m = mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

/// Linear-interpolation quantile (Hyndman-Fan type 7, the R/NumPy default).
inline double quantile(std::span<const double> xs, double q) {
    if (xs.empty()) throw DomainError("quantile of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

// ---------------------------------------------------------------- distributions

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
/// the modified Lentz method. Converges to ~1e-15 relative for the
/// arguments used by the t distribution.
inline double incomplete_beta(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Use the symmetry relation where the fraction converges fastest.
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(1.0 - x, b, a);

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double f = d;
    for (int m = 1; m <= 1000; ++m) {
        const double dm = m;
        // even step
        double num = dm * (b - dm) * x / ((a + 2 * dm - 1) * (a + 2 * dm));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        f *= d * c;
        // odd step
        num = -(a + dm) * (a + b + dm) * x / ((a + 2 * dm) * (a + 2 * dm + 1));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return std::exp(log_front) * f / a;
}

/// P(T <= t) for Student's t with `dof` degrees of freedom (dof > 0, may be
/// fractional).
inline double student_t_cdf(double t, double dof) {
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * incomplete_beta(dof / (dof + t * t), dof / 2.0, 0.5);
    return t > 0 ? 1.0 - tail : tail;
}

// ---------------------------------------------------------------- sign test

/// Exact binomial test of k successes in n trials against p = 1/2.
/// greater: P(X >= k); less: P(X <= k); two: min(1, 2 * smaller tail).
inline double sign_test(std::int64_t k, std::int64_t n, Sided sided = Sided::greater) {
    if (n < 1 || k < 0 || k > n) throw DomainError("sign_test: need 0 <= k <= n and n >= 1");
    auto upper = [&](std::int64_t from) -> double {
        if (n <= 62) {
            // Exact: sum of binomial coefficients, one rounding at the end.
            unsigned __int128 c = 1, sum = 0;
            for (std::int64_t j = 0; j <= n; ++j) {
                if (j >= from) sum += c;
                c = c * static_cast<unsigned __int128>(n - j) / static_cast<unsigned __int128>(j + 1);
            }
            return std::ldexp(static_cast<double>(sum), -static_cast<int>(n));
        }
        long double pmf = std::ldexp(1.0L, -static_cast<int>(n));
        long double sum = 0.0L;
        for (std::int64_t j = 0; j <= n; ++j) {
            if (j >= from) sum += pmf;
            pmf = pmf * static_cast<long double>(n - j) / static_cast<long double>(j + 1);
        }
        return static_cast<double>(std::min(sum, 1.0L));
    };
    const double p_ge = upper(k);
    const double p_le = upper(n - k);  // P(X <= k) = P(X >= n - k) by symmetry
    switch (sided) {
        case Sided::greater: return p_ge;
        case Sided::less: return p_le;
        default: return std::min(1.0, 2.0 * std::min(p_ge, p_le));
    }
}

// ---------------------------------------------------------------- Mann-Whitney U

enum class MwuMethod { automatic, exact, asymptotic };

struct MwuResult {
    double u = 0.0;  ///< U statistic of sample a: rank sum of a minus n_a (n_a + 1) / 2
    double p_value = 1.0;
    double z = 0.0;  ///< 0 for the exact path
    bool exact = false;
    bool ties = false;
};

namespace detail {

/// Midranks (1-based) of the pooled sample; also returns sum of t^3 - t over tie groups.
inline std::vector<double> midranks(std::span<const double> pooled, double& tie_term) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(pooled.size());
    tie_term = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

/// Number of arrangements giving each U in [0, m * n] for tie-free samples
/// of sizes m and n.
inline std::vector<double> u_distribution(std::size_t m, std::size_t n) {
    // counts[m][n][u] via f(m, n, u) = f(m - 1, n, u - n) + f(m, n - 1, u)
    std::vector<std::vector<std::vector<double>>> f(m + 1, std::vector<std::vector<double>>(n + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            f[i][j].assign(i * j + 1, 0.0);
            if (i == 0 || j == 0) {
                f[i][j][0] = 1.0;
                continue;
            }
            for (std::size_t u = 0; u <= i * j; ++u) {
                double v = 0.0;
                if (u >= j && u - j < f[i - 1][j].size()) v += f[i - 1][j][u - j];
                if (u < f[i][j - 1].size()) v += f[i][j - 1][u];
                f[i][j][u] = v;
            }
        }
    }
    return f[m][n];
}

}  // namespace detail

/// Mann-Whitney U test. `less` means sample a tends to be smaller than b.
/// Automatic method: exact enumeration when n_a + n_b <= 16 and there are no
/// ties, otherwise the normal approximation with tie and continuity
/// correction.
inline MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Sided sided = Sided::two,
                                MwuMethod method = MwuMethod::automatic) {
    if (a.empty() || b.empty()) throw DomainError("mann_whitney_u: both samples must be non-empty");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    double tie_term = 0.0;
    const auto ranks = detail::midranks(pooled, tie_term);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

    MwuResult res;
    res.u = rank_sum_a - na * (na + 1.0) / 2.0;
    res.ties = tie_term > 0.0;

    const bool small = a.size() + b.size() <= 16;
    if (method == MwuMethod::exact && res.ties) throw DomainError("mann_whitney_u: exact method requires tie-free samples");
    const bool use_exact = method == MwuMethod::exact || (method == MwuMethod::automatic && small && !res.ties);

    if (use_exact) {
        const auto dist = detail::u_distribution(a.size(), b.size());
        const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
        const auto u = static_cast<std::size_t>(std::llround(res.u));
        double le = 0.0, ge = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (i <= u) le += dist[i];
            if (i >= u) ge += dist[i];
        }
        le /= total;
        ge /= total;
        res.exact = true;
        res.p_value = sided == Sided::less ? le : sided == Sided::greater ? ge : std::min(1.0, 2.0 * std::min(le, ge));
        return res;
    }

    const double n = na + nb;
    const double mu = na * nb / 2.0;
    const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) {
        res.p_value = 1.0;
        return res;
    }
    const double sigma = std::sqrt(var);
    switch (sided) {
        case Sided::less:
            res.z = (res.u - mu + 0.5) / sigma;
            res.p_value = normal_cdf(res.z);
            break;
        case Sided::greater:
            res.z = (res.u - mu - 0.5) / sigma;
            res.p_value = 1.0 - normal_cdf(res.z);
            break;
        default: {
            const double dev = std::max(std::fabs(res.u - mu) - 0.5, 0.0);
            res.z = dev / sigma;
            res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(res.z)));
        }
    }
    res.p_value = std::clamp(res.p_value, 0.0, 1.0);
    return res;
}

// ---------------------------------------------------------------- Welch t test

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;  ///< NaN when both variances are zero
    double p_value = 1.0;
    /// Both samples have zero variance; p is the limiting value.
    bool degenerate = false;
};

/// Welch's unequal-variance t test of mean(a) against mean(b) with
/// Welch-Satterthwaite degrees of freedom. `less` means mean(a) < mean(b).
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b, Sided sided = Sided::two) {
    if (a.size() < 2 || b.size() < 2) throw DomainError("welch_t_test: each sample needs at least two observations");
    const double ma = mean(a), mb = mean(b);
    const double va = sample_variance(a) / static_cast<double>(a.size());
    const double vb = sample_variance(b) / static_cast<double>(b.size());
    const double diff = ma - mb;
    WelchResult res;
    const double se2 = va + vb;
    if (se2 == 0.0) {
        res.degenerate = true;
        res.dof = std::numeric_limits<double>::quiet_NaN();
        if (diff == 0.0) {
            res.t = 0.0;
            res.p_value = 1.0;
        } else {
            res.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            const bool favours = sided == Sided::two || (sided == Sided::less) == (diff < 0);
            res.p_value = favours ? 0.0 : 1.0;
        }
        return res;
    }
    res.t = diff / std::sqrt(se2);
    res.dof = se2 * se2 / (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    const double cdf = student_t_cdf(res.t, res.dof);
    switch (sided) {
        case Sided::less: res.p_value = cdf; break;
        case Sided::greater: res.p_value = student_t_cdf(-res.t, res.dof); break;
        default: res.p_value = std::min(1.0, incomplete_beta(res.dof / (res.dof + res.t * res.t), res.dof / 2.0, 0.5));
    }
    res.p_value = std::clamp(res.p_value, 0.0, 1.0);
    return res;
}

// ---------------------------------------------------------------- least squares

/// Dense column-major design matrix.
struct Design {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  ///< column-major, data[c * rows + r]

    Design(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[c * rows + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
};

struct LeastSquares {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double rss = 0.0;
    bool full_rank = true;
};

/// Ordinary least squares by Householder QR. A column whose diagonal entry
/// in R falls below 1e-9 of its original norm is treated as linearly
/// dependent; the result is then flagged and its coefficients are NaN.
inline LeastSquares ols(const Design& x, std::span<const double> y) {
    if (y.size() != x.rows) throw DomainError("ols: response length does not match design rows");
    if (x.rows < x.cols) throw DomainError("ols: fewer observations than parameters");
    const std::size_t n = x.rows, p = x.cols;
    Design a = x;
    std::vector<double> qty(y.begin(), y.end());
    std::vector<double> col_norm(p);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x(i, j) * x(i, j);
        col_norm[j] = std::sqrt(s);
    }

    LeastSquares out;
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm <= 1e-9 * std::max(col_norm[k], std::numeric_limits<double>::min())) {
            out.full_rank = false;
            break;
        }
        const double alpha = a(k, k) > 0 ? -norm : norm;
        std::vector<double> v(n - k);
        for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (const double e : v) vnorm2 += e * e;
        if (vnorm2 == 0.0) continue;
        auto reflect = [&](auto&& get) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * get(i);
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) get(i) -= scale * v[i - k];
        };
        for (std::size_t j = k; j < p; ++j) reflect([&](std::size_t i) -> double& { return a(i, j); });
        reflect([&](std::size_t i) -> double& { return qty[i]; });
    }

    if (!out.full_rank) {
        out.coefficients.assign(p, std::numeric_limits<double>::quiet_NaN());
        return out;
    }
    out.coefficients.assign(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a(k, j) * out.coefficients[j];
        out.coefficients[k] = s / a(k, k);
    }
    out.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += x(i, j) * out.coefficients[j];
        out.residuals[i] = y[i] - fit;
        out.rss += out.residuals[i] * out.residuals[i];
    }
    return out;
}

}  // namespace beergame::stats
