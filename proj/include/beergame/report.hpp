#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beergame/analysis.hpp"
#include "beergame/experiment.hpp"

namespace beergame {

// Analysis output (under <root>/analysis):
//   summary.json     every statistic below, with contributing cell ids
//   bullwhip.csv     amplification sign test per configuration x regime
//   is_effect.csv    sharing effect per configuration, rows W/O IS, W/ IS, p-value, Test
//   myopia.csv       a_N > a_I sign test per configuration x regime
//   fits.csv         one ordering-rule fit per cell and stage
//   costs.csv        total cost and variance summary per configuration x condition
//   variances.csv    order variance per cell and stage
//
// Report output (under <root>/report): trajectories.csv, boxplot.csv,
// stage_variance.csv and an SVG drawn from each.

/// Relative file name -> content. Rendering is separated from writing so
/// that outputs can be compared byte for byte.
using FileSet = std::map<std::string, std::string>;

struct NoResults : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string condition_label(Regime r) { return r == Regime::isolated ? "W/O IS" : "W/ IS"; }

namespace detail {

inline std::string num(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ += ',';
            out_ += csv_field(fields[i]);
        }
        out_ += '\n';
    }
    [[nodiscard]] const std::string& str() const { return out_; }

private:
    std::string out_;
};

inline nlohmann::ordered_json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ";" : "") + ids[i];
    return out;
}

}  // namespace detail

/// Complete cells of one configuration x regime, in replication order.
struct CellGroup {
    std::string configuration;
    Regime regime = Regime::isolated;
    std::vector<std::string> cell_ids;
    std::vector<TeamTrace> traces;
};

inline std::vector<CellGroup> group_cells(const ResultSet& rs) {
    std::vector<CellGroup> groups;
    for (const auto& conf : rs.plan.configurations) {
        for (const Regime r : rs.plan.regimes) {
            CellGroup g{conf.name, r, {}, {}};
            for (const auto& c : rs.cells) {
                if (c.status != CellStatus::complete || c.key.configuration != conf.name || c.key.regime != r) continue;
                g.cell_ids.push_back(c.key.id());
                g.traces.push_back(*c.trace);
            }
            if (!g.traces.empty()) groups.push_back(std::move(g));
        }
    }
    return groups;
}

// ---------------------------------------------------------------- analyze

inline FileSet analysis_files(const ResultSet& rs) {
    using detail::num;
    using nlohmann::ordered_json;
    const auto groups = group_cells(rs);
    if (groups.empty()) throw NoResults("no complete cells to analyze");

    ordered_json summary;
    summary["schema"] = "beergame.analysis.v1";
    summary["plan_hash"] = rs.plan_hash;
    summary["mode"] = to_string(rs.mode);
    std::size_t failed = 0;
    auto failed_list = ordered_json::array();
    for (const auto& c : rs.cells)
        if (c.status == CellStatus::failed) {
            ++failed;
            failed_list.push_back({{"cell", c.key.id()}, {"reason", c.reason}});
        }
    summary["cells"] = {{"planned", rs.plan.cell_count()},
                        {"complete", rs.complete_count()},
                        {"failed", failed},
                        {"missing", rs.missing}};
    summary["failed_cells"] = failed_list;
    summary["notes"] = {
        "bullwhip: N = runs x 3 adjacent stage pairs; equal variances count as non-amplifying",
        "order variance uses the T-1 divisor",
        "sharing effect: one-sided tests of shared < isolated on pooled per-run, per-stage variances; unpaired",
        "myopia: one fit per run and stage; fits lacking a_I or a_N are excluded and counted",
        "failed cells are excluded from every statistic"};

    detail::Csv bullwhip({"configuration", "condition", "regime", "runs", "successes", "n", "p_value",
                          "end_to_end_pct", "mean_adjacent_pct", "mean_var_s1", "mean_var_s2", "mean_var_s3",
                          "mean_var_s4", "cells"});
    detail::Csv myopia({"configuration", "condition", "regime", "fits", "comparable", "successes", "excluded",
                        "p_value", "mean_a_I", "mean_a_N", "cells"});
    detail::Csv fits({"cell", "stage", "agent", "valid", "reason", "a_0", "a_I", "a_R", "a_S", "a_N", "a_t",
                      "dropped", "observations"});
    detail::Csv costs({"configuration", "condition", "regime", "runs", "total_cost", "total_cost_exact",
                       "cost_s1", "cost_s2", "cost_s3", "cost_s4", "var_mean", "var_median", "var_std", "cells"});
    detail::Csv variances({"cell", "configuration", "regime", "replication", "stage", "variance", "variance_exact"});

    auto group_json = ordered_json::array();
    for (const auto& g : groups) {
        const std::string cond = condition_label(g.regime);
        const std::string regime(to_string(g.regime));
        const std::string ids = detail::join_ids(g.cell_ids);
        ordered_json gj;
        gj["configuration"] = g.configuration;
        gj["regime"] = regime;
        gj["condition"] = cond;
        gj["cells"] = g.cell_ids;

        for (std::size_t i = 0; i < g.traces.size(); ++i)
            for (int s = 1; s <= kNumStages; ++s) {
                const Rational v = order_variance(g.traces[i], s);
                variances.row({g.cell_ids[i], g.configuration, regime,
                               g.cell_ids[i].substr(g.cell_ids[i].rfind('r') + 1), std::to_string(s),
                               num(v.to_double()), v.to_fraction_string()});
            }

        const StatReport bw = bullwhip_report(g.traces);
        const auto& e = bw.extra;
        bullwhip.row({g.configuration, cond, regime, std::to_string(g.traces.size()), num(bw.statistic),
                      std::to_string(bw.n), num(bw.p_value), num(e.at("end_to_end_pct")),
                      num(e.at("mean_adjacent_pct")), num(e.at("mean_var_s1")), num(e.at("mean_var_s2")),
                      num(e.at("mean_var_s3")), num(e.at("mean_var_s4")), ids});
        gj["bullwhip"] = {{"test", bw.test},
                          {"successes", bw.statistic},
                          {"n", bw.n},
                          {"p_value", detail::jnum(bw.p_value)},
                          {"end_to_end_pct", detail::jnum(e.at("end_to_end_pct"))},
                          {"mean_adjacent_pct", detail::jnum(e.at("mean_adjacent_pct"))},
                          {"mean_var", {e.at("mean_var_s1"), e.at("mean_var_s2"), e.at("mean_var_s3"),
                                        e.at("mean_var_s4")}}};

        if (g.traces.front().config.horizon >= 8) {
            std::vector<RegressionFit> fs;
            for (std::size_t i = 0; i < g.traces.size(); ++i)
                for (int s = 1; s <= kNumStages; ++s) {
                    auto f = fit_ordering_regression(g.traces[i], s,
                                                     g.traces[i].policies[static_cast<std::size_t>(s - 1)]);
                    std::string dropped;
                    for (std::size_t t = 0; t < 6; ++t)
                        if (f.dropped[t]) dropped += (dropped.empty() ? "" : ";") + std::string(kRegressionTerms[t]);
                    std::vector<std::string> row{g.cell_ids[i], std::to_string(s), f.agent, f.valid ? "1" : "0",
                                                 f.reason};
                    for (std::size_t t = 0; t < 6; ++t)
                        row.push_back(f.valid && !f.dropped[t] ? num(f.coef[t]) : "NA");
                    row.push_back(dropped);
                    row.push_back(std::to_string(f.observations));
                    fits.row(row);
                    fs.push_back(std::move(f));
                }
            const StatReport my = myopia_sign_test(fs);
            double sum_i = 0, sum_n = 0;
            for (const auto& f : fs)
                if (f.comparable()) {
                    sum_i += f.a_I();
                    sum_n += f.a_N();
                }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const double mean_i = my.n > 0 ? sum_i / static_cast<double>(my.n) : nan;
            const double mean_n = my.n > 0 ? sum_n / static_cast<double>(my.n) : nan;
            myopia.row({g.configuration, cond, regime, std::to_string(fs.size()), std::to_string(my.n),
                        num(my.statistic), num(my.extra.at("excluded_fits")), num(my.p_value), num(mean_i),
                        num(mean_n), ids});
            gj["myopia"] = {{"test", my.test},
                            {"fits", fs.size()},
                            {"comparable", my.n},
                            {"successes", my.statistic},
                            {"excluded", my.extra.at("excluded_fits")},
                            {"p_value", my.p_value},
                            {"mean_a_I", detail::jnum(mean_i)},
                            {"mean_a_N", detail::jnum(mean_n)}};
        } else {
            gj["myopia"] = nullptr;
        }

        const CostSummary cs = cost_summary(g.traces);
        const auto pooled = pooled_variances(g.traces);
        const GroupSummary vs = summarize(pooled);
        costs.row({g.configuration, cond, regime, std::to_string(cs.runs), num(cs.mean_system_cost.to_double()),
                   cs.mean_system_cost.to_fraction_string(), num(cs.mean_stage_cost[0].to_double()),
                   num(cs.mean_stage_cost[1].to_double()), num(cs.mean_stage_cost[2].to_double()),
                   num(cs.mean_stage_cost[3].to_double()), num(vs.mean), num(vs.median), num(vs.sd), ids});
        auto stage_cost = ordered_json::array();
        for (const auto& c : cs.mean_stage_cost) stage_cost.push_back(c.to_double());
        gj["cost"] = {{"runs", cs.runs},
                      {"mean_system_cost", cs.mean_system_cost.to_double()},
                      {"mean_system_cost_exact", cs.mean_system_cost.to_fraction_string()},
                      {"mean_stage_cost", stage_cost}};
        gj["variance"] = {{"n", vs.n}, {"mean", vs.mean}, {"sd", vs.sd}, {"median", vs.median}};
        group_json.push_back(std::move(gj));
    }
    summary["groups"] = group_json;

    // Sharing effect: needs both regimes of a configuration.
    detail::Csv is_effect({"configuration", "row", "mean_sd", "median", "cells"});
    auto effect_json = ordered_json::array();
    for (const auto& conf : rs.plan.configurations) {
        const CellGroup* iso = nullptr;
        const CellGroup* sh = nullptr;
        for (const auto& g : groups) {
            if (g.configuration != conf.name) continue;
            (g.regime == Regime::isolated ? iso : sh) = &g;
        }
        if (!iso || !sh) continue;
        const auto a = pooled_variances(iso->traces);
        const auto b = pooled_variances(sh->traces);
        if (a.size() < 2 || b.size() < 2) continue;
        const SharingEffect eff = sharing_effect(a, b);
        auto ids = iso->cell_ids;
        ids.insert(ids.end(), sh->cell_ids.begin(), sh->cell_ids.end());
        const std::string joined = detail::join_ids(ids);
        auto msd = [](const GroupSummary& s) { return num(s.mean) + " (" + num(s.sd) + ")"; };
        is_effect.row({conf.name, "W/O IS", msd(eff.without_sharing), num(eff.without_sharing.median), joined});
        is_effect.row({conf.name, "W/ IS", msd(eff.with_sharing), num(eff.with_sharing.median), joined});
        is_effect.row({conf.name, "p-value", num(eff.t_test.p_value), num(eff.mann_whitney.p_value), joined});
        is_effect.row({conf.name, "Test", "t-test", "M.W.", joined});
        auto side = [](const GroupSummary& s) {
            return ordered_json{{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"median", s.median}};
        };
        effect_json.push_back(
            {{"configuration", conf.name},
             {"without_sharing", side(eff.without_sharing)},
             {"with_sharing", side(eff.with_sharing)},
             {"welch", {{"t", detail::jnum(eff.t_test.t)},
                        {"dof", detail::jnum(eff.t_test.dof)},
                        {"p_value", eff.t_test.p_value},
                        {"degenerate", eff.t_test.degenerate},
                        {"sided", "less"}}},
             {"mann_whitney", {{"u", eff.mann_whitney.u},
                               {"z", eff.mann_whitney.z},
                               {"p_value", eff.mann_whitney.p_value},
                               {"exact", eff.mann_whitney.exact},
                               {"ties", eff.mann_whitney.ties},
                               {"sided", "less"}}},
             {"cells", ids}});
    }
    summary["is_effect"] = effect_json;

    FileSet files;
    files["summary.json"] = summary.dump(2) + "\n";
    files["bullwhip.csv"] = bullwhip.str();
    files["is_effect.csv"] = is_effect.str();
    files["myopia.csv"] = myopia.str();
    files["fits.csv"] = fits.str();
    files["costs.csv"] = costs.str();
    files["variances.csv"] = variances.str();
    return files;
}

// ---------------------------------------------------------------- figures

namespace detail {

inline const std::array<const char*, kNumStages>& stage_colours() {
    static const std::array<const char*, kNumStages> c = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
    return c;
}

class Svg {
public:
    Svg(double w, double h) : w_(w), h_(h) {}
    void raw(const std::string& s) { body_ += s + "\n"; }
    void line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1) {
        body_ += "<line x1=\"" + f(x1) + "\" y1=\"" + f(y1) + "\" x2=\"" + f(x2) + "\" y2=\"" + f(y2) +
                 "\" stroke=\"" + stroke + "\" stroke-width=\"" + f(width) + "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const char* fill, const char* stroke = "none") {
        body_ += "<rect x=\"" + f(x) + "\" y=\"" + f(y) + "\" width=\"" + f(w) + "\" height=\"" + f(h) +
                 "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
        std::string p;
        for (const auto& [x, y] : pts) p += f(x) + "," + f(y) + " ";
        body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1.5\" points=\"" + p +
                 "\"/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const char* fill) {
        std::string p;
        for (const auto& [x, y] : pts) p += f(x) + "," + f(y) + " ";
        body_ += "<polygon fill=\"" + std::string(fill) + "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" + p +
                 "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const char* anchor = "start") {
        body_ += "<text x=\"" + f(x) + "\" y=\"" + f(y) + "\" font-family=\"sans-serif\" font-size=\"11\" "
                 "text-anchor=\"" + anchor + "\">" + s + "</text>\n";
    }
    [[nodiscard]] std::string str() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(w_) + "\" height=\"" + f(h_) +
               "\" viewBox=\"0 0 " + f(w_) + " " + f(h_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body_ + "</svg>\n";
    }

private:
    static std::string f(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }
    double w_, h_;
    std::string body_;
};

inline std::string group_label(const CellGroup& g) { return g.configuration + " " + condition_label(g.regime); }

}  // namespace detail

struct TrajectoryPoint {
    double mean = 0, q1 = 0, q3 = 0;
};

/// [stage][period-1] summary of orders across a group's runs.
inline std::vector<std::vector<TrajectoryPoint>> order_trajectories(const CellGroup& g) {
    const std::size_t horizon = g.traces.front().periods.size();
    std::vector<std::vector<TrajectoryPoint>> out(kNumStages, std::vector<TrajectoryPoint>(horizon));
    std::vector<double> xs;
    for (std::size_t s = 0; s < kNumStages; ++s)
        for (std::size_t t = 0; t < horizon; ++t) {
            xs.clear();
            for (const auto& tr : g.traces) xs.push_back(static_cast<double>(tr.periods[t].orders[s]));
            out[s][t] = {stats::mean(xs), stats::quantile(xs, 0.25), stats::quantile(xs, 0.75)};
        }
    return out;
}

struct BoxStats {
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double whisker_low = 0, whisker_high = 0;  ///< Tukey: furthest points within 1.5 IQR
    std::size_t outliers = 0;
};

inline BoxStats box_stats(std::span<const double> xs) {
    BoxStats b;
    b.n = xs.size();
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    b.min = v.front();
    b.max = v.back();
    b.q1 = stats::quantile(v, 0.25);
    b.median = stats::quantile(v, 0.5);
    b.q3 = stats::quantile(v, 0.75);
    const double lo = b.q1 - 1.5 * (b.q3 - b.q1), hi = b.q3 + 1.5 * (b.q3 - b.q1);
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (const double x : v) {
        if (x < lo || x > hi) {
            ++b.outliers;
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, x);
        b.whisker_high = std::max(b.whisker_high, x);
    }
    return b;
}

inline FileSet report_files(const ResultSet& rs) {
    using detail::num;
    const auto groups = group_cells(rs);
    if (groups.empty()) throw NoResults("no complete cells to report");
    FileSet files;

    // (a) trajectories
    detail::Csv traj({"configuration", "regime", "stage", "period", "runs", "mean", "q1", "q3"});
    const double pw = 420, ph = 150, ml = 150, mt = 30;
    detail::Svg tsvg(ml + pw + 30, mt + static_cast<double>(groups.size()) * (ph + 25) + 10);
    tsvg.text(ml, 18, "Orders per period: mean with interquartile band");
    for (std::size_t s = 0; s < kNumStages; ++s)
        tsvg.text(ml + pw - 150 + 38 * static_cast<double>(s), 18, "S" + std::to_string(s + 1));
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const auto tr = order_trajectories(g);
        const std::size_t horizon = tr.front().size();
        double ymax = 1;
        for (std::size_t s = 0; s < kNumStages; ++s)
            for (std::size_t t = 0; t < horizon; ++t) {
                traj.row({g.configuration, std::string(to_string(g.regime)), std::to_string(s + 1),
                          std::to_string(t + 1), std::to_string(g.traces.size()), num(tr[s][t].mean),
                          num(tr[s][t].q1), num(tr[s][t].q3)});
                ymax = std::max(ymax, tr[s][t].q3);
            }
        const double top = mt + static_cast<double>(gi) * (ph + 25);
        tsvg.text(10, top + ph / 2, detail::group_label(g));
        tsvg.rect(ml, top, pw, ph, "none", "#999");
        auto px = [&](std::size_t t) {
            return ml + (horizon > 1 ? pw * static_cast<double>(t) / static_cast<double>(horizon - 1) : pw / 2);
        };
        auto py = [&](double y) { return top + ph - ph * y / ymax; };
        for (std::size_t s = 0; s < kNumStages; ++s) {
            std::vector<std::pair<double, double>> band, line;
            for (std::size_t t = 0; t < horizon; ++t) {
                band.emplace_back(px(t), py(tr[s][t].q3));
                line.emplace_back(px(t), py(tr[s][t].mean));
            }
            for (std::size_t t = horizon; t-- > 0;) band.emplace_back(px(t), py(tr[s][t].q1));
            tsvg.polygon(band, detail::stage_colours()[s]);
            tsvg.polyline(line, detail::stage_colours()[s]);
        }
    }
    files["trajectories.csv"] = traj.str();
    files["trajectories.svg"] = tsvg.str();

    // (b) variance box plots
    detail::Csv box({"configuration", "regime", "n", "min", "q1", "median", "q3", "max", "whisker_low",
                     "whisker_high", "outliers"});
    std::vector<BoxStats> boxes;
    double vmax = 1;
    for (const auto& g : groups) {
        const auto v = pooled_variances(g.traces);
        const BoxStats b = box_stats(v);
        box.row({g.configuration, std::string(to_string(g.regime)), std::to_string(b.n), num(b.min), num(b.q1),
                 num(b.median), num(b.q3), num(b.max), num(b.whisker_low), num(b.whisker_high),
                 std::to_string(b.outliers)});
        vmax = std::max(vmax, b.whisker_high);
        boxes.push_back(b);
    }
    const double bw = 60, bh = 260, bl = 40, bt = 30;
    detail::Svg bsvg(bl + bw * static_cast<double>(groups.size()) + 40, bt + bh + 60);
    bsvg.text(bl, 18, "Order variance per run and stage (whiskers at 1.5 IQR)");
    auto by = [&](double y) { return bt + bh - bh * std::min(y, vmax) / vmax; };
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const double cx = bl + bw * (static_cast<double>(i) + 0.5);
        const char* fill = groups[i].regime == Regime::isolated ? "#fdd49e" : "#9ecae1";
        bsvg.line(cx, by(b.whisker_low), cx, by(b.whisker_high), "#333");
        bsvg.rect(cx - bw * 0.3, by(b.q3), bw * 0.6, std::max(by(b.q1) - by(b.q3), 0.5), fill, "#333");
        bsvg.line(cx - bw * 0.3, by(b.median), cx + bw * 0.3, by(b.median), "#000", 2);
        bsvg.raw("<text x=\"0\" y=\"0\" font-family=\"sans-serif\" font-size=\"10\" transform=\"translate(" +
                 num(cx) + "," + num(bt + bh + 8) + ") rotate(45)\">" + detail::group_label(groups[i]) + "</text>");
    }
    files["boxplot.csv"] = box.str();
    files["boxplot.svg"] = bsvg.str();

    // (c) stage-wise variance
    detail::Csv sv({"configuration", "regime", "stage", "runs", "mean_variance", "median_variance"});
    std::vector<std::array<double, kNumStages>> means;
    double smax = 1;
    for (const auto& g : groups) {
        std::array<double, kNumStages> m{};
        for (int s = 1; s <= kNumStages; ++s) {
            std::vector<double> v;
            for (const auto& t : g.traces) v.push_back(order_variance(t, s).to_double());
            m[static_cast<std::size_t>(s - 1)] = stats::mean(v);
            sv.row({g.configuration, std::string(to_string(g.regime)), std::to_string(s),
                    std::to_string(g.traces.size()), num(stats::mean(v)), num(stats::median(v))});
            smax = std::max(smax, stats::mean(v));
        }
        means.push_back(m);
    }
    const double gw = 90, sh = 240, sl = 40, st = 30;
    detail::Svg ssvg(sl + gw * static_cast<double>(groups.size()) + 40, st + sh + 60);
    ssvg.text(sl, 18, "Mean order variance by stage");
    for (std::size_t s = 0; s < kNumStages; ++s)
        ssvg.text(sl + 220 + 38 * static_cast<double>(s), 18, "S" + std::to_string(s + 1));
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double x0 = sl + gw * static_cast<double>(i) + 8;
        for (std::size_t s = 0; s < kNumStages; ++s) {
            const double h = sh * means[i][s] / smax;
            ssvg.rect(x0 + 18 * static_cast<double>(s), st + sh - h, 16, h, detail::stage_colours()[s]);
        }
        ssvg.raw("<text x=\"0\" y=\"0\" font-family=\"sans-serif\" font-size=\"10\" transform=\"translate(" +
                 num(x0) + "," + num(st + sh + 8) + ") rotate(45)\">" + detail::group_label(groups[i]) + "</text>");
    }
    files["stage_variance.csv"] = sv.str();
    files["stage_variance.svg"] = ssvg.str();
    return files;
}

inline void write_files(const std::filesystem::path& dir, const FileSet& files) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
}

}  // namespace beergame
