#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "beergame/config.hpp"
#include "beergame/sim.hpp"

namespace beergame {

// Trace file layout (JSON Lines, one object per line):
//
//   {"record":"header","schema":"beergame.trace.v1","config":{...},"seed":N,
//    "regime":"isolated","policies":[s1,s2,s3,s4]}
//   {"record":"period","period":t,"demand":D,"orders":[..],"shipments":[..],
//    "inventory_end":[..],"period_cost":[..],"incoming_demand":[..],
//    "arrivals":[..],"supply_line":[..]}          x horizon
//   {"record":"totals","total_cost_per_stage":[..]}
//
// Per-stage arrays are ordered retailer -> manufacturer.

inline constexpr const char* kTraceSchema = "beergame.trace.v1";

inline nlohmann::ordered_json rational_to_json(const Rational& r) {
    const std::string dec = r.to_decimal_string();
    if (dec.find('/') != std::string::npos) return dec;
    return r.to_double();
}

inline Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) {
        const std::string text = j.dump();
        if (text.find_first_of("eE") != std::string::npos)
            throw ConfigError("use a plain decimal or \"p/q\" string for rational values, got " + text);
        return Rational::parse(text);
    }
    throw ConfigError("expected a number or \"p/q\" string, got " + j.dump());
}

inline nlohmann::ordered_json to_json(const GameConfig& c) {
    nlohmann::ordered_json j;
    j["horizon"] = c.horizon;
    j["num_stages"] = kNumStages;
    j["ship_delay"] = c.ship_delay;
    j["order_delay"] = c.order_delay;
    j["production_delay"] = c.production_delay;
    j["holding_cost"] = rational_to_json(c.holding_cost);
    j["backlog_cost"] = rational_to_json(c.backlog_cost);
    j["initial_inventory"] = c.initial_inventory;
    j["stage_capacity"] = c.stage_capacity;
    j["pipeline_prefill"] = c.pipeline_prefill;
    j["demand_law"] = {{"kind", "uniform_int"}, {"min", c.demand_min}, {"max", c.demand_max}};
    j["order_cap_enabled"] = c.order_cap_enabled;
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline GameConfig game_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("game: expected an object");
    GameConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "horizon") c.horizon = value.get<int>();
            else if (key == "ship_delay") c.ship_delay = value.get<int>();
            else if (key == "order_delay") c.order_delay = value.get<int>();
            else if (key == "production_delay") c.production_delay = value.get<int>();
            else if (key == "holding_cost") c.holding_cost = rational_from_json(value);
            else if (key == "backlog_cost") c.backlog_cost = rational_from_json(value);
            else if (key == "initial_inventory") c.initial_inventory = value.get<int>();
            else if (key == "stage_capacity") c.stage_capacity = value.get<int>();
            else if (key == "pipeline_prefill") c.pipeline_prefill = value.get<int>();
            else if (key == "order_cap_enabled") c.order_cap_enabled = value.get<bool>();
            else if (key == "num_stages") {
                if (value.get<int>() != kNumStages) throw ConfigError("num_stages is fixed at 4");
            } else if (key == "demand_law") {
                if (!value.is_object()) throw ConfigError("expected {\"kind\": \"uniform_int\", \"min\": a, \"max\": b}");
                for (const auto& [k, _] : value.items())
                    if (k != "kind" && k != "min" && k != "max") throw ConfigError("unknown field " + k);
                if (value.value("kind", std::string("uniform_int")) != "uniform_int")
                    throw ConfigError("only uniform_int demand is supported");
                c.demand_min = value.value("min", c.demand_min);
                c.demand_max = value.value("max", c.demand_max);
            } else {
                throw ConfigError("unknown field");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("game." + key + ": " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError("game." + key + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

template <class T, std::size_t N>
nlohmann::ordered_json array_json(const std::array<T, N>& a) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& v : a) {
        if constexpr (std::is_same_v<T, Rational>) j.push_back(rational_to_json(v));
        else j.push_back(v);
    }
    return j;
}

inline std::string serialize_trace(const TeamTrace& trace) {
    std::ostringstream out;
    nlohmann::ordered_json header;
    header["record"] = "header";
    header["schema"] = kTraceSchema;
    header["config"] = to_json(trace.config);
    header["seed"] = trace.seed;
    header["regime"] = to_string(trace.regime);
    header["policies"] = array_json(trace.policies);
    out << header.dump() << '\n';
    for (const auto& p : trace.periods) {
        nlohmann::ordered_json j;
        j["record"] = "period";
        j["period"] = p.period;
        j["demand"] = p.demand;
        j["orders"] = array_json(p.orders);
        j["shipments"] = array_json(p.shipments);
        j["inventory_end"] = array_json(p.inventory_end);
        j["period_cost"] = array_json(p.period_cost);
        j["incoming_demand"] = array_json(p.incoming);
        j["arrivals"] = array_json(p.arrivals);
        j["supply_line"] = array_json(p.supply_line);
        out << j.dump() << '\n';
    }
    nlohmann::ordered_json totals;
    totals["record"] = "totals";
    totals["total_cost_per_stage"] = array_json(trace.total_cost_per_stage);
    out << totals.dump() << '\n';
    return out.str();
}

template <class T>
std::array<T, kNumStages> stage_array_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != kNumStages) throw ConfigError("expected a 4-element array, got " + j.dump());
    std::array<T, kNumStages> out{};
    for (std::size_t i = 0; i < kNumStages; ++i) {
        if constexpr (std::is_same_v<T, Rational>) out[i] = rational_from_json(j[i]);
        else out[i] = j[i].get<T>();
    }
    return out;
}

/// Parses a trace and checks that every stored cost equals the cost
/// recomputed from the inventory path.
inline TeamTrace parse_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    TeamTrace trace;
    bool have_header = false, have_totals = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const std::string kind = j.at("record").get<std::string>();
        if (kind == "header") {
            if (j.at("schema").get<std::string>() != kTraceSchema) throw ConfigError("unsupported trace schema");
            trace.config = game_config_from_json(j.at("config"));
            trace.seed = j.at("seed").get<std::uint64_t>();
            trace.regime = parse_regime(j.at("regime").get<std::string>());
            trace.policies = stage_array_from_json<std::string>(j.at("policies"));
            have_header = true;
        } else if (kind == "period") {
            PeriodRecord p;
            p.period = j.at("period").get<int>();
            p.demand = j.at("demand").get<Units>();
            p.orders = stage_array_from_json<Units>(j.at("orders"));
            p.shipments = stage_array_from_json<Units>(j.at("shipments"));
            p.inventory_end = stage_array_from_json<Units>(j.at("inventory_end"));
            p.period_cost = stage_array_from_json<Rational>(j.at("period_cost"));
            p.incoming = stage_array_from_json<Units>(j.at("incoming_demand"));
            p.arrivals = stage_array_from_json<Units>(j.at("arrivals"));
            p.supply_line = stage_array_from_json<Units>(j.at("supply_line"));
            trace.periods.push_back(p);
        } else if (kind == "totals") {
            trace.total_cost_per_stage = stage_array_from_json<Rational>(j.at("total_cost_per_stage"));
            have_totals = true;
        } else {
            throw ConfigError("unknown trace record '" + kind + "'");
        }
    }
    if (!have_header || !have_totals) throw ConfigError("trace is missing its header or totals record");
    for (int i = 1; i <= kNumStages; ++i) {
        if (total_cost(trace, i) != trace.total_cost_per_stage[static_cast<std::size_t>(i - 1)])
            throw ConfigError("trace totals disagree with the inventory path at stage " + std::to_string(i));
    }
    return trace;
}

inline void write_trace(const std::string& path, const TeamTrace& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << serialize_trace(trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline TeamTrace read_trace(const std::string& path) { return parse_trace(read_file(path)); }

}  // namespace beergame
