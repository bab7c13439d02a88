#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "beergame/config.hpp"
#include "beergame/sim.hpp"

namespace beergame {

struct SharedView {
    /// On-hand inventory and backlog of all four stages, retailer first.
    StageArray on_hand{};
    StageArray backlog{};

    friend bool operator==(const SharedView&, const SharedView&) = default;
};

/// Everything one stage may see when it decides in one period.
struct Observation {
    int period = 1;  ///< 1-based
    int stage = 1;   ///< 1 = retailer ... 4 = manufacturer
    Regime regime = Regime::isolated;

    Units own_inventory = 0;  ///< net inventory at the end of the previous period
    Units own_backlog = 0;
    Units arriving_now = 0;
    /// Retail demand for stage 1, the downstream order for stages 2-4.
    Units incoming_demand = 0;
    Units supply_line = 0;
    /// Shipments (or production) already on the way to this stage, including
    /// arriving_now.
    Units in_transit = 0;
    /// Lead time of this stage's replenishment pipeline.
    int lead_time = 2;

    /// Full game history up to the previous period, oldest first.
    std::vector<Units> past_orders;
    std::vector<Units> past_incoming;
    std::vector<Units> past_arrivals;
    std::vector<Units> past_shipments;

    std::optional<SharedView> shared_view;

    [[nodiscard]] Units on_hand() const { return std::max<Units>(own_inventory, 0); }

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct PolicyDecision {
    Units order = 0;
    std::string rationale;
};

/// Decision source for one stage. Implementations may keep their own
/// recorded state (transcripts) but must be deterministic given it.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const Observation& obs) = 0;
    /// Short identifier recorded in trace headers, e.g. "constant(4)".
    [[nodiscard]] virtual std::string id() const = 0;
};

/// Builds stage `stage`'s view of the world before period state.period + 1.
/// Under the isolated regime nothing about other stages is included.
inline Observation build_observation(const GameState& state, const std::vector<PeriodRecord>& history, int stage,
                                     Regime regime, Units retail_demand, const GameConfig& config) {
    check_stage(stage);
    const auto idx = static_cast<std::size_t>(stage - 1);
    const auto& s = state.stages[idx];

    Observation obs;
    obs.period = state.period + 1;
    obs.stage = stage;
    obs.regime = regime;
    obs.own_inventory = s.inventory;
    obs.own_backlog = s.backlog();
    obs.arriving_now = s.inbound.front();
    obs.incoming_demand = incoming_demand(state, stage, retail_demand);
    obs.supply_line = s.supply_line();
    obs.in_transit = s.inbound.total();
    obs.lead_time = config.lead_time(stage);

    obs.past_orders.reserve(history.size());
    for (const auto& rec : history) {
        obs.past_orders.push_back(rec.orders[idx]);
        obs.past_incoming.push_back(rec.incoming[idx]);
        obs.past_arrivals.push_back(rec.arrivals[idx]);
        obs.past_shipments.push_back(rec.shipments[idx]);
    }

    if (regime == Regime::shared) {
        SharedView view;
        for (std::size_t i = 0; i < kNumStages; ++i) {
            view.on_hand[i] = state.stages[i].on_hand();
            view.backlog[i] = state.stages[i].backlog();
        }
        obs.shared_view = view;
    }
    return obs;
}

}  // namespace beergame
