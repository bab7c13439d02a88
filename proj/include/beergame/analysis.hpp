#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "beergame/errors.hpp"
#include "beergame/rational.hpp"
#include "beergame/sim.hpp"
#include "beergame/stats.hpp"

namespace beergame {

/// Outcome of one statistical comparison.
struct StatReport {
    std::string test;
    std::vector<std::string> groups;
    double statistic = 0.0;
    double p_value = 1.0;
    std::int64_t n = 0;
    stats::Sided sided = stats::Sided::greater;
    /// Named auxiliary quantities (counts, percentages, degrees of freedom).
    std::map<std::string, double> extra;
    std::vector<std::string> notes;
};

inline void require_complete(const TeamTrace& trace) {
    if (trace.periods.size() != static_cast<std::size_t>(trace.config.horizon))
        throw DomainError("incomplete run: trace does not span the horizon");
}

/// Unbiased sample variance of a stage's orders O_1..O_T, exact.
inline Rational order_variance(const TeamTrace& trace, int stage) {
    check_stage(stage);
    const auto n = static_cast<std::int64_t>(trace.periods.size());
    if (n < 2) throw DomainError("order_variance: need at least two periods");
    std::int64_t sum = 0, sum_sq = 0;
    for (const auto& p : trace.periods) {
        const Units o = p.orders[static_cast<std::size_t>(stage - 1)];
        sum += o;
        sum_sq += o * o;
    }
    return Rational(n * sum_sq - sum * sum, n * (n - 1));
}

inline std::array<double, kNumStages> stage_variances(const TeamTrace& trace) {
    std::array<double, kNumStages> v{};
    for (int i = 1; i <= kNumStages; ++i) v[static_cast<std::size_t>(i - 1)] = order_variance(trace, i).to_double();
    return v;
}

/// Mean order variance of each stage across runs.
inline std::array<double, kNumStages> mean_stage_variances(std::span<const TeamTrace> runs) {
    std::array<double, kNumStages> m{};
    for (const auto& r : runs) {
        const auto v = stage_variances(r);
        for (std::size_t i = 0; i < kNumStages; ++i) m[i] += v[i];
    }
    for (auto& x : m) x /= static_cast<double>(runs.size());
    return m;
}

/// Amplification test: for every run and adjacent pair (S1,S2), (S2,S3),
/// (S3,S4) counts Var(upstream) > Var(downstream); ties count as failures.
/// One-sided exact sign test over the pooled 3 * runs comparisons.
///
/// Two amplification percentages are attached, because the conventional
/// "order variance increased by x%" figure is ambiguous:
///   end_to_end_pct     = 100 * (mean Var(S4) / mean Var(S1) - 1)
///   mean_adjacent_pct  = 100 * average over pairs of (mean Var(S_{i+1}) / mean Var(S_i) - 1)
/// Either is NaN when a denominator is zero.
inline StatReport bullwhip_report(std::span<const TeamTrace> runs) {
    if (runs.empty()) throw DomainError("bullwhip_report: no runs");
    std::int64_t k = 0, n = 0;
    for (const auto& r : runs) {
        require_complete(r);
        const auto v = stage_variances(r);
        for (std::size_t i = 0; i + 1 < kNumStages; ++i, ++n)
            if (v[i + 1] > v[i]) ++k;
    }
    StatReport rep;
    rep.test = "sign test (bullwhip)";
    rep.groups = {"S1<S2", "S2<S3", "S3<S4"};
    rep.statistic = static_cast<double>(k);
    rep.n = n;
    rep.sided = stats::Sided::greater;
    rep.p_value = stats::sign_test(k, n, stats::Sided::greater);

    const auto m = mean_stage_variances(runs);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.extra["successes"] = static_cast<double>(k);
    rep.extra["end_to_end_pct"] = m[0] > 0 ? 100.0 * (m[3] / m[0] - 1.0) : nan;
    double adj = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < kNumStages; ++i) {
        if (!(m[i] > 0)) ok = false;
        else adj += m[i + 1] / m[i] - 1.0;
    }
    rep.extra["mean_adjacent_pct"] = ok ? 100.0 * adj / 3.0 : nan;
    for (std::size_t i = 0; i < kNumStages; ++i) rep.extra["mean_var_s" + std::to_string(i + 1)] = m[i];
    rep.notes.push_back("N = runs x 3 adjacent stage pairs; equal variances count as non-amplifying");
    return rep;
}

// ---------------------------------------------------------------- ordering regression

inline constexpr std::array<const char*, 6> kRegressionTerms = {"a_0", "a_I", "a_R", "a_S", "a_N", "a_t"};

/// O_t = a_0 + a_I I_{t-1} + a_R R_t + a_S S_t + a_N N_t + a_t t + e
///
/// I_{t-1} is signed net inventory before the period, R_t the incoming
/// demand, S_t units received, N_t the supply line at decision time.
struct RegressionFit {
    std::string agent;
    /// a_0, a_I, a_R, a_S, a_N, a_t. Dropped terms hold 0.
    std::array<double, 6> coef{};
    std::array<bool, 6> dropped{};
    double residual_variance = 0.0;
    std::size_t observations = 0;
    bool valid = false;
    std::string reason;  ///< why the fit is invalid

    [[nodiscard]] double a_I() const { return coef[1]; }
    [[nodiscard]] double a_N() const { return coef[4]; }
    /// Usable for the a_N > a_I comparison.
    [[nodiscard]] bool comparable() const { return valid && !dropped[1] && !dropped[4]; }
};

struct RegressionData {
    std::vector<std::array<double, 5>> regressors;  ///< I_{t-1}, R_t, S_t, N_t, t
    std::vector<double> response;
};

inline RegressionData regression_data(const TeamTrace& trace, int stage) {
    check_stage(stage);
    const auto idx = static_cast<std::size_t>(stage - 1);
    RegressionData d;
    for (const auto& p : trace.periods) {
        d.regressors.push_back({static_cast<double>(inventory_before(trace, stage, p.period)),
                                static_cast<double>(p.incoming[idx]), static_cast<double>(p.arrivals[idx]),
                                static_cast<double>(p.supply_line[idx]), static_cast<double>(p.period)});
        d.response.push_back(static_cast<double>(p.orders[idx]));
    }
    return d;
}

/// Deficiency rule: a constant response invalidates the fit; regressors with
/// zero variance are dropped (they duplicate the intercept) and reported as
/// such; any remaining linear dependence invalidates the fit.
inline RegressionFit fit_regression(const RegressionData& data, std::string agent = {}) {
    RegressionFit fit;
    fit.agent = std::move(agent);
    const std::size_t n = data.response.size();
    fit.observations = n;
    if (n < 8) {
        fit.reason = "fewer than 8 observations";
        return fit;
    }
    auto constant = [](auto&& get, std::size_t count) {
        for (std::size_t i = 1; i < count; ++i)
            if (get(i) != get(0)) return false;
        return true;
    };
    if (constant([&](std::size_t i) { return data.response[i]; }, n)) {
        fit.reason = "constant response";
        return fit;
    }
    std::vector<std::size_t> kept;  // indices into the 5 regressors
    for (std::size_t j = 0; j < 5; ++j) {
        if (constant([&](std::size_t i) { return data.regressors[i][j]; }, n)) fit.dropped[j + 1] = true;
        else kept.push_back(j);
    }
    stats::Design x(n, kept.size() + 1);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t c = 0; c < kept.size(); ++c) x(i, c + 1) = data.regressors[i][kept[c]];
    }
    if (n <= x.cols) {
        fit.reason = "no residual degrees of freedom";
        return fit;
    }
    const auto ls = stats::ols(x, data.response);
    if (!ls.full_rank) {
        fit.reason = "rank-deficient design";
        return fit;
    }
    fit.coef[0] = ls.coefficients[0];
    for (std::size_t c = 0; c < kept.size(); ++c) fit.coef[kept[c] + 1] = ls.coefficients[c + 1];
    fit.residual_variance = ls.rss / static_cast<double>(n - x.cols);
    fit.valid = true;
    return fit;
}

inline RegressionFit fit_ordering_regression(const TeamTrace& trace, int stage, std::string agent = {}) {
    if (trace.periods.size() < 8) throw DomainError("fit_ordering_regression: need T >= 8");
    return fit_regression(regression_data(trace, stage), std::move(agent));
}

/// Supply-line underweighting: counts comparable fits with a_N > a_I and
/// runs a one-sided exact sign test over them.
inline StatReport myopia_sign_test(std::span<const RegressionFit> fits) {
    if (fits.empty()) throw DomainError("myopia_sign_test: no fits");
    std::int64_t k = 0, n = 0, excluded = 0;
    for (const auto& f : fits) {
        if (!f.comparable()) {
            ++excluded;
            continue;
        }
        ++n;
        if (f.a_N() > f.a_I()) ++k;
    }
    StatReport rep;
    rep.test = "sign test (a_N > a_I)";
    rep.groups = {"a_N", "a_I"};
    rep.statistic = static_cast<double>(k);
    rep.n = n;
    rep.sided = stats::Sided::greater;
    rep.p_value = n > 0 ? stats::sign_test(k, n, stats::Sided::greater) : 1.0;
    rep.extra["successes"] = static_cast<double>(k);
    rep.extra["excluded_fits"] = static_cast<double>(excluded);
    if (n == 0) rep.notes.push_back("no comparable fits; p reported as 1");
    return rep;
}

// ---------------------------------------------------------------- costs

struct CostSummary {
    std::size_t runs = 0;
    Rational mean_system_cost{0};
    std::array<Rational, kNumStages> mean_stage_cost{};
};

inline CostSummary cost_summary(std::span<const TeamTrace> runs) {
    if (runs.empty()) throw DomainError("cost_summary: no runs");
    CostSummary out;
    out.runs = runs.size();
    Rational system{0};
    std::array<Rational, kNumStages> stage{};
    for (const auto& r : runs) {
        require_complete(r);
        system += system_cost(r);
        for (std::size_t i = 0; i < kNumStages; ++i) stage[i] += r.total_cost_per_stage[i];
    }
    const Rational inv(1, static_cast<std::int64_t>(runs.size()));
    out.mean_system_cost = system * inv;
    for (std::size_t i = 0; i < kNumStages; ++i) out.mean_stage_cost[i] = stage[i] * inv;
    return out;
}

// ---------------------------------------------------------------- information-sharing effect

struct GroupSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
};

inline GroupSummary summarize(std::span<const double> xs) {
    GroupSummary g;
    g.n = xs.size();
    if (xs.empty()) return g;
    g.mean = stats::mean(xs);
    g.sd = xs.size() > 1 ? stats::sample_sd(xs) : 0.0;
    g.median = stats::median(xs);
    return g;
}

/// All per-run, per-stage order variances of a set of runs.
inline std::vector<double> pooled_variances(std::span<const TeamTrace> runs) {
    std::vector<double> out;
    out.reserve(runs.size() * kNumStages);
    for (const auto& r : runs)
        for (const double v : stage_variances(r)) out.push_back(v);
    return out;
}

struct SharingEffect {
    GroupSummary without_sharing;
    GroupSummary with_sharing;
    stats::WelchResult t_test;
    stats::MwuResult mann_whitney;
};

/// Does sharing lower order variance? Both tests are one-sided with the
/// alternative "shared < isolated", on pooled per-stage variances.
inline SharingEffect sharing_effect(std::span<const double> isolated, std::span<const double> shared) {
    SharingEffect e;
    e.without_sharing = summarize(isolated);
    e.with_sharing = summarize(shared);
    e.t_test = stats::welch_t_test(shared, isolated, stats::Sided::less);
    e.mann_whitney = stats::mann_whitney_u(shared, isolated, stats::Sided::less);
    return e;
}

}  // namespace beergame
