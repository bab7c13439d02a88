#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beergame/config.hpp"
#include "beergame/gateway.hpp"
#include "beergame/policies.hpp"
#include "beergame/rng.hpp"
#include "beergame/trace_io.hpp"

namespace beergame {

// Plan file (JSON). Every key except master_seed is optional.
//
//   {
//     "master_seed": 20240611,
//     "replications": 32,
//     "regimes": ["isolated", "shared"],
//     "configurations": ["Original", "R-Overall", "R-S1", "R-S2", "R-S3", "R-S4"],
//     "family": "A",
//     "game": { "horizon": 20, "holding_cost": "1/2", ... },
//     "agents": {
//       "shallow": {"kind": "llm", "model_id": "...", "endpoint": "https://.../chat/completions",
//                   "api_key_env": "SHALLOW_API_KEY", "max_retries": 2},
//       "deep":    {"kind": "tracking_demand"}
//     },
//     "stub": {"shallow": {"alpha": 1.0, "beta": 0.2}, "deep": {"alpha": 0.6, "beta": 0.5}}
//   }
//
// Agent kinds: llm | tracking_demand | constant{value} | match_demand |
// panic{alpha, beta, target}. A configuration may also be written as
// {"name": "R-S2", "tiers": ["shallow", "deep", "shallow", "shallow"]};
// the tiers must agree with the name.

inline constexpr const char* kPlanSchema = "beergame.plan.v1";

inline const std::array<std::string, 6>& standard_configurations() {
    static const std::array<std::string, 6> names = {"Original", "R-Overall", "R-S1", "R-S2", "R-S3", "R-S4"};
    return names;
}

/// Tier of each stage for a named configuration.
inline std::array<Tier, kNumStages> configuration_tiers(const std::string& name) {
    std::array<Tier, kNumStages> t{};
    t.fill(Tier::shallow);
    if (name == "Original") return t;
    if (name == "R-Overall") {
        t.fill(Tier::deep);
        return t;
    }
    if (name.size() == 4 && name.rfind("R-S", 0) == 0 && name[3] >= '1' && name[3] <= '4') {
        t[static_cast<std::size_t>(name[3] - '1')] = Tier::deep;
        return t;
    }
    throw ConfigError("unknown configuration '" + name + "'");
}

struct Configuration {
    std::string name;
    std::array<Tier, kNumStages> tiers{};
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

enum class AgentKind { llm, tracking_demand, constant, match_demand, panic };

struct AgentSpec {
    AgentKind kind = AgentKind::tracking_demand;
    ModelProfile profile;  ///< llm only
    ScriptRule rule;       ///< constant / match_demand / panic
};

struct ExperimentPlan {
    std::uint64_t master_seed = 0;
    int replications = 32;
    std::vector<Regime> regimes{Regime::isolated, Regime::shared};
    std::vector<Configuration> configurations;
    Family family = Family::A;
    GameConfig game;
    AgentSpec shallow;
    AgentSpec deep;
    StubChatModel::Behaviour stub_shallow{1.0, 0.2, 12};
    StubChatModel::Behaviour stub_deep{0.6, 0.5, 12};

    [[nodiscard]] const AgentSpec& agent(Tier t) const { return t == Tier::deep ? deep : shallow; }
    [[nodiscard]] bool uses_llm() const {
        for (const auto& c : configurations)
            for (const Tier t : c.tiers)
                if (agent(t).kind == AgentKind::llm) return true;
        return false;
    }
    [[nodiscard]] std::size_t cell_count() const {
        return configurations.size() * regimes.size() * static_cast<std::size_t>(replications);
    }
};

// ---------------------------------------------------------------- seeds

/// Seed of the demand path for a replication. Depends on nothing else, so
/// every configuration and regime sees the same demand for a given index.
inline std::uint64_t demand_seed(std::uint64_t master, int replication) {
    if (replication < 0) throw ConfigError("replication index must be >= 0");
    return SplitMix64::mix(SplitMix64::mix(master ^ 0x6A09E667F3BCC908ULL) + static_cast<std::uint64_t>(replication) *
                                                                                  SplitMix64::kGamma);
}

/// Per-cell seed: the demand seed mixed with hashes of the configuration
/// and regime names. Drives anything cell-specific, such as stub-model noise.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& configuration, Regime regime,
                                 int replication) {
    std::uint64_t h = fnv1a64(configuration);
    h = fnv1a64("/", h);
    h = fnv1a64(to_string(regime), h);
    return SplitMix64::mix(demand_seed(master, replication) ^ SplitMix64::mix(h));
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string_view to_string(AgentKind k) {
    switch (k) {
        case AgentKind::llm: return "llm";
        case AgentKind::tracking_demand: return "tracking_demand";
        case AgentKind::constant: return "constant";
        case AgentKind::match_demand: return "match_demand";
        case AgentKind::panic: return "panic";
    }
    return "?";
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& where,
                           std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + "." + key + ": unknown field");
    }
}

template <class T>
T field(const nlohmann::json& obj, const std::string& where, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type (got " + obj.at(key).dump() + ")");
    }
}

inline AgentSpec parse_agent(const nlohmann::json& j, const std::string& where, Tier tier, Family family) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const auto kind = field<std::string>(j, where, "kind", "");
    AgentSpec a;
    if (kind == "llm") {
        reject_unknown(j, where, {"kind", "model_id", "endpoint", "api_key_env", "auth_header", "auth_prefix",
                                  "temperature", "max_retries", "timeout_ms", "backoff_ms", "family"});
        a.kind = AgentKind::llm;
        ModelProfile& p = a.profile;
        p.tier = tier;
        p.family = parse_family(field<std::string>(j, where, "family", std::string(beergame::to_string(family))));
        p.model_id = field<std::string>(j, where, "model_id", "");
        if (p.model_id.empty()) throw ConfigError(where + ".model_id: required for kind llm");
        p.endpoint = field<std::string>(j, where, "endpoint", "");
        p.api_key_env = field<std::string>(j, where, "api_key_env", p.api_key_env);
        p.auth_header = field<std::string>(j, where, "auth_header", p.auth_header);
        p.auth_prefix = field<std::string>(j, where, "auth_prefix", p.auth_prefix);
        p.temperature = field<double>(j, where, "temperature", p.temperature);
        p.max_retries = field<int>(j, where, "max_retries", p.max_retries);
        p.timeout_ms = field<std::int64_t>(j, where, "timeout_ms", p.timeout_ms);
        p.backoff_ms = field<std::int64_t>(j, where, "backoff_ms", p.backoff_ms);
        if (p.max_retries < 0) throw ConfigError(where + ".max_retries: must be >= 0");
        if (p.timeout_ms <= 0) throw ConfigError(where + ".timeout_ms: must be > 0");
        if (p.backoff_ms < 0) throw ConfigError(where + ".backoff_ms: must be >= 0");
    } else if (kind == "tracking_demand") {
        reject_unknown(j, where, {"kind"});
        a.kind = AgentKind::tracking_demand;
    } else if (kind == "constant") {
        reject_unknown(j, where, {"kind", "value"});
        a.kind = AgentKind::constant;
        const auto v = field<Units>(j, where, "value", 4);
        if (v < 0) throw ConfigError(where + ".value: must be >= 0");
        a.rule = ConstantRule{v};
    } else if (kind == "match_demand") {
        reject_unknown(j, where, {"kind"});
        a.kind = AgentKind::match_demand;
        a.rule = MatchDemandRule{};
    } else if (kind == "panic") {
        reject_unknown(j, where, {"kind", "alpha", "beta", "target"});
        a.kind = AgentKind::panic;
        a.rule = PanicRule{field<double>(j, where, "alpha", 1.0), field<double>(j, where, "beta", 0.0),
                           field<Units>(j, where, "target", 12)};
    } else {
        throw ConfigError(where + ".kind: expected llm|tracking_demand|constant|match_demand|panic, got '" + kind +
                          "'");
    }
    return a;
}

inline nlohmann::ordered_json agent_json(const AgentSpec& a) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(a.kind);
    switch (a.kind) {
        case AgentKind::llm: {
            const auto& p = a.profile;
            j["family"] = beergame::to_string(p.family);
            j["model_id"] = p.model_id;
            j["endpoint"] = p.endpoint;
            j["api_key_env"] = p.api_key_env;
            j["auth_header"] = p.auth_header;
            j["auth_prefix"] = p.auth_prefix;
            j["temperature"] = p.temperature;
            j["max_retries"] = p.max_retries;
            j["timeout_ms"] = p.timeout_ms;
            j["backoff_ms"] = p.backoff_ms;
            break;
        }
        case AgentKind::constant: j["value"] = std::get<ConstantRule>(a.rule).value; break;
        case AgentKind::panic: {
            const auto& r = std::get<PanicRule>(a.rule);
            j["alpha"] = r.alpha;
            j["beta"] = r.beta;
            j["target"] = r.target;
            break;
        }
        default: break;
    }
    return j;
}

inline StubChatModel::Behaviour parse_behaviour(const nlohmann::json& j, const std::string& where,
                                                StubChatModel::Behaviour b) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown(j, where, {"alpha", "beta", "target"});
    b.alpha = field<double>(j, where, "alpha", b.alpha);
    b.beta = field<double>(j, where, "beta", b.beta);
    b.target = field<Units>(j, where, "target", b.target);
    return b;
}

inline Configuration parse_configuration(const nlohmann::json& j, const std::string& where) {
    Configuration c;
    if (j.is_string()) {
        c.name = j.get<std::string>();
        try {
            c.tiers = configuration_tiers(c.name);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        return c;
    }
    if (!j.is_object()) throw ConfigError(where + ": expected a name or {name, tiers}");
    reject_unknown(j, where, {"name", "tiers"});
    c.name = field<std::string>(j, where, "name", "");
    try {
        c.tiers = configuration_tiers(c.name);
    } catch (const ConfigError& e) {
        throw ConfigError(where + ".name: " + e.what());
    }
    if (j.contains("tiers")) {
        const auto& t = j.at("tiers");
        if (!t.is_array() || t.size() != kNumStages) throw ConfigError(where + ".tiers: expected 4 tier names");
        for (std::size_t i = 0; i < kNumStages; ++i) {
            Tier tier{};
            try {
                tier = parse_tier(t[i].is_string() ? t[i].get<std::string>() : t[i].dump());
            } catch (const ConfigError& e) {
                throw ConfigError(where + ".tiers[" + std::to_string(i) + "]: " + e.what());
            }
            if (tier != c.tiers[i])
                throw ConfigError(where + ".tiers[" + std::to_string(i) + "]: does not match configuration " + c.name);
        }
    }
    return c;
}

}  // namespace detail

inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("plan: expected a JSON object");
    detail::reject_unknown(j, "plan", {"schema", "name", "master_seed", "replications", "regimes", "configurations",
                                       "family", "game", "agents", "stub"});
    if (j.contains("schema") && j.at("schema") != kPlanSchema)
        throw ConfigError("plan.schema: expected \"" + std::string(kPlanSchema) + "\"");
    ExperimentPlan p;
    if (!j.contains("master_seed")) throw ConfigError("plan.master_seed: required");
    if (!j.at("master_seed").is_number_integer() ||
        (j.at("master_seed").is_number_integer() && !j.at("master_seed").is_number_unsigned()))
        throw ConfigError("plan.master_seed: expected a non-negative integer");
    p.master_seed = j.at("master_seed").get<std::uint64_t>();
    p.replications = detail::field<int>(j, "plan", "replications", 32);
    if (p.replications < 1) throw ConfigError("plan.replications: must be >= 1");

    if (j.contains("regimes")) {
        const auto& r = j.at("regimes");
        if (!r.is_array() || r.empty()) throw ConfigError("plan.regimes: expected a non-empty array");
        p.regimes.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            try {
                const Regime reg = parse_regime(r[i].is_string() ? r[i].get<std::string>() : r[i].dump());
                if (std::find(p.regimes.begin(), p.regimes.end(), reg) != p.regimes.end())
                    throw ConfigError("duplicate regime");
                p.regimes.push_back(reg);
            } catch (const std::exception& e) {
                throw ConfigError("plan.regimes[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    if (j.contains("configurations")) {
        const auto& c = j.at("configurations");
        if (!c.is_array() || c.empty()) throw ConfigError("plan.configurations: expected a non-empty array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto conf = detail::parse_configuration(c[i], "plan.configurations[" + std::to_string(i) + "]");
            for (const auto& seen : p.configurations)
                if (seen.name == conf.name)
                    throw ConfigError("plan.configurations[" + std::to_string(i) + "]: duplicate " + conf.name);
            p.configurations.push_back(std::move(conf));
        }
    } else {
        for (const auto& name : standard_configurations()) p.configurations.push_back({name, configuration_tiers(name)});
    }
    p.family = parse_family(detail::field<std::string>(j, "plan", "family", "A"));
    if (j.contains("game")) p.game = game_config_from_json(j.at("game"));

    if (j.contains("agents")) {
        const auto& a = j.at("agents");
        if (!a.is_object()) throw ConfigError("plan.agents: expected an object");
        detail::reject_unknown(a, "plan.agents", {"shallow", "deep"});
        if (a.contains("shallow"))
            p.shallow = detail::parse_agent(a.at("shallow"), "plan.agents.shallow", Tier::shallow, p.family);
        if (a.contains("deep")) p.deep = detail::parse_agent(a.at("deep"), "plan.agents.deep", Tier::deep, p.family);
    }
    if (j.contains("stub")) {
        const auto& s = j.at("stub");
        if (!s.is_object()) throw ConfigError("plan.stub: expected an object");
        detail::reject_unknown(s, "plan.stub", {"shallow", "deep"});
        if (s.contains("shallow")) p.stub_shallow = detail::parse_behaviour(s.at("shallow"), "plan.stub.shallow", p.stub_shallow);
        if (s.contains("deep")) p.stub_deep = detail::parse_behaviour(s.at("deep"), "plan.stub.deep", p.stub_deep);
    }
    return p;
}

/// Parses plan text. JSON syntax errors report line and column.
inline ExperimentPlan parse_plan(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("plan: JSON syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
    }
    return plan_from_json(j);
}

inline ExperimentPlan load_plan(const std::string& path) { return parse_plan(read_file(path)); }

/// Canonical form: every field explicit, fixed key order.
inline nlohmann::ordered_json to_json(const ExperimentPlan& p) {
    nlohmann::ordered_json j;
    j["schema"] = kPlanSchema;
    j["master_seed"] = p.master_seed;
    j["replications"] = p.replications;
    auto regimes = nlohmann::ordered_json::array();
    for (const Regime r : p.regimes) regimes.push_back(to_string(r));
    j["regimes"] = regimes;
    auto confs = nlohmann::ordered_json::array();
    for (const auto& c : p.configurations) {
        auto tiers = nlohmann::ordered_json::array();
        for (const Tier t : c.tiers) tiers.push_back(to_string(t));
        confs.push_back({{"name", c.name}, {"tiers", tiers}});
    }
    j["configurations"] = confs;
    j["family"] = to_string(p.family);
    j["game"] = to_json(p.game);
    j["agents"] = {{"shallow", detail::agent_json(p.shallow)}, {"deep", detail::agent_json(p.deep)}};
    auto behaviour = [](const StubChatModel::Behaviour& b) {
        return nlohmann::ordered_json{{"alpha", b.alpha}, {"beta", b.beta}, {"target", b.target}};
    };
    j["stub"] = {{"shallow", behaviour(p.stub_shallow)}, {"deep", behaviour(p.stub_deep)}};
    return j;
}

inline std::string plan_hash(const ExperimentPlan& p) { return hex64(fnv1a64(to_json(p).dump())); }

}  // namespace beergame
