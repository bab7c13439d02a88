#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beergame/errors.hpp"
#include "beergame/observation.hpp"
#include "beergame/transcript.hpp"

namespace beergame {

namespace detail {

/// round(num / den) with halves away from zero, den > 0.
inline Units round_half_away(Units num, Units den) {
    const Units mag = num < 0 ? -num : num;
    const Units q = (2 * mag + den) / (2 * den);
    return num < 0 ? -q : q;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace detail

/// Demand-tracking heuristic. Targets a moving average of recent shipments
/// times the lead time plus the current backlog, and orders the shortfall
/// net of on-hand stock, downstream backlog and in-transit units:
///
///     S_avg  = mean of the last `max_lead` shipments to the customer
///     target = S_avg * lead_time + own backlog
///     raw    = target - on_hand - downstream backlog - in_transit
///     order  = round(min(max(0, raw), capacity))
///
/// Downstream backlog is only observable under the shared regime; otherwise
/// it is taken as 0. With no shipment history the average falls back to
/// `cold_start_mean`.
struct TrackingDemandParams {
    int lead_time = 2;
    int max_lead = 3;
    Units capacity = 20;
    Units cold_start_mean = 4;
};

inline PolicyDecision tracking_demand_decide(const Observation& obs, const TrackingDemandParams& p) {
    // Work in units of 1/n so a fractional moving average stays exact.
    Units n = 1;
    Units shipped = p.cold_start_mean;
    if (!obs.past_shipments.empty()) {
        const auto take = std::min<std::size_t>(obs.past_shipments.size(), static_cast<std::size_t>(p.max_lead));
        n = static_cast<Units>(take);
        shipped = 0;
        for (auto it = obs.past_shipments.end() - static_cast<std::ptrdiff_t>(take); it != obs.past_shipments.end(); ++it)
            shipped += *it;
    }
    const Units downstream_backlog =
        (obs.shared_view && obs.stage > 1) ? obs.shared_view->backlog[static_cast<std::size_t>(obs.stage - 2)] : 0;
    const Units target_n = shipped * p.lead_time + n * obs.own_backlog;
    const Units raw_n = target_n - n * (obs.on_hand() + downstream_backlog + obs.in_transit);

    Units order = 0;
    if (raw_n > 0) order = raw_n >= n * p.capacity ? p.capacity : detail::round_half_away(raw_n, n);

    std::ostringstream why;
    why << "avg_shipments=" << shipped << "/" << n << " target*n=" << target_n << " raw*n=" << raw_n;
    return {order, why.str()};
}

class TrackingDemandPolicy final : public Policy {
public:
    explicit TrackingDemandPolicy(TrackingDemandParams params) : params_(params) {}

    /// Standard parameters for a stage: its own lead time, the system's
    /// longest lead time as averaging window, and the stage capacity.
    static TrackingDemandPolicy for_stage(const GameConfig& config, int stage) {
        return TrackingDemandPolicy({config.lead_time(stage), config.max_lead_time(), config.stage_capacity,
                                     config.pipeline_prefill});
    }

    PolicyDecision decide(const Observation& obs) override { return tracking_demand_decide(obs, params_); }
    [[nodiscard]] std::string id() const override { return "tracking_demand"; }

private:
    TrackingDemandParams params_;
};

struct ConstantRule {
    Units value = 4;
};
struct MatchDemandRule {};
/// Orders incoming demand plus alpha of the inventory gap, minus beta of the
/// supply line. beta < alpha underweights the supply line.
struct PanicRule {
    double alpha = 1.0;
    double beta = 0.0;
    Units target = 12;
};
using ScriptRule = std::variant<ConstantRule, MatchDemandRule, PanicRule>;

inline PolicyDecision scripted_decide(const Observation& obs, const ScriptRule& rule) {
    return std::visit(
        [&](const auto& r) -> PolicyDecision {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantRule>) {
                return {r.value, {}};
            } else if constexpr (std::is_same_v<R, MatchDemandRule>) {
                return {obs.incoming_demand, {}};
            } else {
                const double gap = static_cast<double>(std::max<Units>(r.target - obs.own_inventory, 0));
                const double raw = static_cast<double>(obs.incoming_demand) + r.alpha * gap -
                                   r.beta * static_cast<double>(obs.supply_line);
                return {static_cast<Units>(std::round(std::max(raw, 0.0))), {}};
            }
        },
        rule);
}

inline std::string rule_id(const ScriptRule& rule) {
    return std::visit(
        [](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantRule>) return "constant(" + std::to_string(r.value) + ")";
            else if constexpr (std::is_same_v<R, MatchDemandRule>) return "match_demand";
            else
                return "panic(" + detail::format_double(r.alpha) + "," + detail::format_double(r.beta) + "," +
                       std::to_string(r.target) + ")";
        },
        rule);
}

class ScriptedPolicy final : public Policy {
public:
    explicit ScriptedPolicy(ScriptRule rule) : rule_(std::move(rule)) {}
    PolicyDecision decide(const Observation& obs) override { return scripted_decide(obs, rule_); }
    [[nodiscard]] std::string id() const override { return rule_id(rule_); }

private:
    ScriptRule rule_;
};

/// Plays back a fixed order list; period t gets orders[t-1]. Test fixture.
class SequencePolicy final : public Policy {
public:
    explicit SequencePolicy(std::vector<Units> orders) : orders_(std::move(orders)) {}
    PolicyDecision decide(const Observation& obs) override {
        const auto i = static_cast<std::size_t>(obs.period - 1);
        if (i >= orders_.size()) throw ReplayGapError(obs.stage, obs.period);
        return {orders_[i], {}};
    }
    [[nodiscard]] std::string id() const override { return "sequence"; }

private:
    std::vector<Units> orders_;
};

inline PolicyDecision replay_decide(const AgentTranscript& transcript, int period) {
    const auto* rec = transcript.find(period);
    if (rec == nullptr) throw ReplayGapError(transcript.stage, period);
    return {rec->parsed_order, rec->raw_completion};
}

/// Returns recorded decisions; never contacts a model.
class ReplayPolicy final : public Policy {
public:
    explicit ReplayPolicy(AgentTranscript transcript, std::string recorded_id = {})
        : transcript_(std::move(transcript)), recorded_id_(std::move(recorded_id)) {}
    PolicyDecision decide(const Observation& obs) override { return replay_decide(transcript_, obs.period); }
    [[nodiscard]] std::string id() const override { return recorded_id_.empty() ? "replay" : recorded_id_; }

private:
    AgentTranscript transcript_;
    std::string recorded_id_;
};

}  // namespace beergame
