#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "beergame/config.hpp"
#include "beergame/errors.hpp"
#include "beergame/rational.hpp"

namespace beergame {

using Units = std::int64_t;
using StageArray = std::array<Units, kNumStages>;

/// Fixed-length FIFO of in-transit quantities. Slot 0 is due next period.
class DelayLine {
public:
    DelayLine() = default;
    DelayLine(std::size_t length, Units fill) : slots_(length, fill) {}

    [[nodiscard]] std::size_t length() const { return slots_.size(); }
    [[nodiscard]] Units front() const { return slots_.empty() ? 0 : slots_.front(); }
    [[nodiscard]] Units total() const { return std::accumulate(slots_.begin(), slots_.end(), Units{0}); }
    [[nodiscard]] const std::deque<Units>& slots() const { return slots_; }

    /// Pops the due quantity and enqueues `incoming` at the back.
    Units advance(Units incoming) {
        if (slots_.empty()) throw StructuralError("DelayLine: advance on zero-length line");
        const Units due = slots_.front();
        slots_.pop_front();
        slots_.push_back(incoming);
        return due;
    }

    friend bool operator==(const DelayLine&, const DelayLine&) = default;

private:
    std::deque<Units> slots_;
};

struct StageState {
    /// Net inventory; negative values are backlog.
    Units inventory = 0;
    /// Shipments from upstream (stages 1-3) or own production (stage 4).
    DelayLine inbound;
    /// Own orders travelling to the upstream stage. Zero length for the
    /// manufacturer, whose orders go straight into its production line.
    DelayLine outbound;
    Rational cumulative_cost{0};

    [[nodiscard]] Units on_hand() const { return std::max<Units>(inventory, 0); }
    [[nodiscard]] Units backlog() const { return std::max<Units>(-inventory, 0); }
    [[nodiscard]] Units supply_line() const { return inbound.total() + outbound.total(); }

    friend bool operator==(const StageState&, const StageState&) = default;
};

struct GameState {
    std::array<StageState, kNumStages> stages;
    /// Number of periods already played.
    int period = 0;

    friend bool operator==(const GameState&, const GameState&) = default;
};

struct PeriodRecord {
    int period = 0;
    Units demand = 0;
    StageArray orders{};
    StageArray shipments{};
    StageArray inventory_end{};
    std::array<Rational, kNumStages> period_cost{};
    /// Demand each stage faced this period (retail demand or downstream order).
    StageArray incoming{};
    /// Units received this period.
    StageArray arrivals{};
    /// Supply line at decision time, before this period's orders.
    StageArray supply_line{};

    friend bool operator==(const PeriodRecord&, const PeriodRecord&) = default;
};

struct TeamTrace {
    GameConfig config;
    std::uint64_t seed = 0;
    Regime regime = Regime::isolated;
    std::array<std::string, kNumStages> policies;
    std::vector<PeriodRecord> periods;
    std::array<Rational, kNumStages> total_cost_per_stage{};

    friend bool operator==(const TeamTrace&, const TeamTrace&) = default;
};

inline void check_stage(int stage) {
    if (stage < 1 || stage > kNumStages) throw StructuralError("stage index out of range: " + std::to_string(stage));
}

/// h * max(I, 0) - s * min(I, 0).
inline Rational period_cost(const GameConfig& config, Units inventory) {
    return config.holding_cost * Rational(std::max<Units>(inventory, 0)) +
           config.backlog_cost * Rational(std::max<Units>(-inventory, 0));
}

/// Units a stage ships this period: bounded by what was asked of it, by what it
/// physically has (prior net inventory plus today's arrival), and by capacity.
inline Units compute_shipment(int stage, Units incoming_demand, Units prior_inventory, Units arriving_units,
                              Units capacity) {
    check_stage(stage);
    return std::min({incoming_demand, std::max<Units>(prior_inventory + arriving_units, 0), capacity});
}

inline GameState initial_state(const GameConfig& config) {
    config.validate();
    GameState state;
    for (int i = 0; i < kNumStages; ++i) {
        auto& s = state.stages[static_cast<std::size_t>(i)];
        s.inventory = config.initial_inventory;
        const bool manufacturer = i + 1 == kNumStages;
        s.inbound = DelayLine(static_cast<std::size_t>(manufacturer ? config.production_delay : config.ship_delay),
                              config.pipeline_prefill);
        s.outbound = DelayLine(manufacturer ? 0 : static_cast<std::size_t>(config.order_delay), config.pipeline_prefill);
    }
    return state;
}

inline void check_shape(const GameState& state, const GameConfig& config) {
    for (int i = 0; i < kNumStages; ++i) {
        const auto& s = state.stages[static_cast<std::size_t>(i)];
        const bool manufacturer = i + 1 == kNumStages;
        const auto want_in = static_cast<std::size_t>(manufacturer ? config.production_delay : config.ship_delay);
        const auto want_out = manufacturer ? std::size_t{0} : static_cast<std::size_t>(config.order_delay);
        if (s.inbound.length() != want_in || s.outbound.length() != want_out) {
            throw StructuralError("delay line length mismatch at stage " + std::to_string(i + 1));
        }
    }
}

/// Demand stage `stage` faces this period, before anything moves.
inline Units incoming_demand(const GameState& state, int stage, Units retail_demand) {
    check_stage(stage);
    return stage == 1 ? retail_demand : state.stages[static_cast<std::size_t>(stage - 2)].outbound.front();
}

/// Plays one period. All four orders take effect together against the same
/// pre-period state.
inline std::pair<GameState, PeriodRecord> advance_period(GameState state, const StageArray& orders, Units demand,
                                                         const GameConfig& config) {
    check_shape(state, config);
    for (int i = 0; i < kNumStages; ++i) {
        if (orders[static_cast<std::size_t>(i)] < 0) throw DecisionError(i + 1, state.period + 1, "negative order");
    }

    PeriodRecord rec;
    rec.period = state.period + 1;
    rec.demand = demand;
    rec.orders = orders;

    for (int i = 0; i < kNumStages; ++i) {
        const auto& s = state.stages[static_cast<std::size_t>(i)];
        rec.incoming[static_cast<std::size_t>(i)] = incoming_demand(state, i + 1, demand);
        rec.arrivals[static_cast<std::size_t>(i)] = s.inbound.front();
        rec.supply_line[static_cast<std::size_t>(i)] = s.supply_line();
        rec.shipments[static_cast<std::size_t>(i)] =
            compute_shipment(i + 1, rec.incoming[static_cast<std::size_t>(i)], s.inventory,
                             rec.arrivals[static_cast<std::size_t>(i)], config.stage_capacity);
    }

    for (int i = 0; i < kNumStages; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        auto& s = state.stages[idx];
        const bool manufacturer = i + 1 == kNumStages;
        s.inbound.advance(manufacturer ? orders[idx] : rec.shipments[idx + 1]);
        if (!manufacturer) s.outbound.advance(orders[idx]);
        s.inventory += rec.arrivals[idx] - rec.incoming[idx];
        rec.inventory_end[idx] = s.inventory;
        rec.period_cost[idx] = period_cost(config, s.inventory);
        s.cumulative_cost += rec.period_cost[idx];
    }
    state.period = rec.period;
    return {std::move(state), rec};
}

/// Total holding plus backlog cost of one stage, recomputed from its
/// inventory path.
inline Rational total_cost(const TeamTrace& trace, int stage) {
    check_stage(stage);
    Rational sum{0};
    for (const auto& p : trace.periods) sum += period_cost(trace.config, p.inventory_end[static_cast<std::size_t>(stage - 1)]);
    return sum;
}

inline Rational system_cost(const TeamTrace& trace) {
    Rational sum{0};
    for (const auto& c : trace.total_cost_per_stage) sum += c;
    return sum;
}

/// Net inventory of a stage before period `t` (1-based) was played.
inline Units inventory_before(const TeamTrace& trace, int stage, int t) {
    return t <= 1 ? trace.config.initial_inventory
                  : trace.periods[static_cast<std::size_t>(t - 2)].inventory_end[static_cast<std::size_t>(stage - 1)];
}

}  // namespace beergame
