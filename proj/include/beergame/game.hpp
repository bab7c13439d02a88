#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "beergame/observation.hpp"
#include "beergame/rng.hpp"
#include "beergame/sim.hpp"

namespace beergame {

using PolicySet = std::array<Policy*, kNumStages>;

/// Called after each stage decides; lets callers log or record decisions.
using DecisionHook = std::function<void(const Observation&, const PolicyDecision&)>;

/// Plays a full game. Every stage observes the same pre-period snapshot, so
/// the order in which policies are queried cannot leak information.
inline TeamTrace run_game(const GameConfig& config, const PolicySet& policies, std::uint64_t seed, Regime regime,
                          const DecisionHook& on_decision = {}) {
    config.validate();
    TeamTrace trace;
    trace.config = config;
    trace.seed = seed;
    trace.regime = regime;
    for (std::size_t i = 0; i < kNumStages; ++i) {
        if (policies[i] == nullptr) throw StructuralError("run_game: missing policy for stage " + std::to_string(i + 1));
        trace.policies[i] = policies[i]->id();
    }
    trace.periods.reserve(static_cast<std::size_t>(config.horizon));

    GameState state = initial_state(config);
    for (int t = 1; t <= config.horizon; ++t) {
        const Units demand = draw_demand(seed, t, config.demand_min, config.demand_max);
        StageArray orders{};
        for (int i = 1; i <= kNumStages; ++i) {
            const Observation obs = build_observation(state, trace.periods, i, regime, demand, config);
            const PolicyDecision decision = policies[static_cast<std::size_t>(i - 1)]->decide(obs);
            if (decision.order < 0) throw DecisionError(i, t, "negative order " + std::to_string(decision.order));
            if (on_decision) on_decision(obs, decision);
            orders[static_cast<std::size_t>(i - 1)] =
                config.order_cap_enabled ? std::min<Units>(decision.order, config.stage_capacity) : decision.order;
        }
        auto [next, record] = advance_period(std::move(state), orders, demand, config);
        state = std::move(next);
        trace.periods.push_back(std::move(record));
    }
    for (int i = 1; i <= kNumStages; ++i)
        trace.total_cost_per_stage[static_cast<std::size_t>(i - 1)] = state.stages[static_cast<std::size_t>(i - 1)].cumulative_cost;
    return trace;
}

}  // namespace beergame
