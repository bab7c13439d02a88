#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include "beergame/errors.hpp"
#include "beergame/rational.hpp"

namespace beergame {

inline constexpr int kNumStages = 4;

enum class Regime { isolated, shared };

inline std::string_view to_string(Regime r) { return r == Regime::isolated ? "isolated" : "shared"; }

inline Regime parse_regime(std::string_view s) {
    if (s == "isolated") return Regime::isolated;
    if (s == "shared") return Regime::shared;
    throw ConfigError("unknown regime '" + std::string(s) + "' (expected isolated|shared)");
}

/// Environment constants for one game. Defaults are the standard laboratory
/// setting: 20 periods, 2-period shipping and ordering delays, 3-period
/// production, 12 units on hand, 0.5/1.0 holding/backlog cost, capacity 20.
struct GameConfig {
    int horizon = 20;
    int ship_delay = 2;
    int order_delay = 2;
    int production_delay = 3;
    Rational holding_cost{1, 2};
    Rational backlog_cost{1};
    int initial_inventory = 12;
    int stage_capacity = 20;
    /// Units placed in every in-transit slot at t = 0.
    int pipeline_prefill = 4;
    /// Clamp agent orders at stage_capacity. Shipments are always clamped.
    bool order_cap_enabled = false;

    /// Retail demand is uniform over the integers [demand_min, demand_max].
    int demand_min = 0;
    int demand_max = 8;

    static constexpr int num_stages = kNumStages;

    /// Replenishment lead time seen by a stage: shipping for stages 1-3,
    /// production for the manufacturer.
    [[nodiscard]] int lead_time(int stage) const { return stage == kNumStages ? production_delay : ship_delay; }
    [[nodiscard]] int max_lead_time() const { return std::max(ship_delay, production_delay); }

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ConfigError(std::string("GameConfig: ") + what);
        };
        require(horizon >= 1, "horizon must be >= 1");
        require(ship_delay >= 1 && order_delay >= 1 && production_delay >= 1, "delays must be >= 1");
        require(holding_cost >= Rational(0) && backlog_cost >= Rational(0), "costs must be >= 0");
        require(stage_capacity >= 0, "stage_capacity must be >= 0");
        require(initial_inventory >= 0, "initial_inventory must be >= 0");
        require(pipeline_prefill >= 0, "pipeline_prefill must be >= 0");
        require(demand_min >= 0 && demand_min <= demand_max, "demand law needs 0 <= min <= max");
    }

    friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

}  // namespace beergame
