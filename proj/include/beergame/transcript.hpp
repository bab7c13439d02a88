#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beergame/errors.hpp"
#include "beergame/sim.hpp"

namespace beergame {

/// One (period, stage) decision as it was made.
struct DecisionRecord {
    int period = 0;
    int stage = 0;
    std::string policy;
    /// FNV-1a 64 of the system prompt, hex. Empty for scripted policies.
    std::string system_prompt_hash;
    std::string user_prompt;
    std::string raw_completion;
    Units parsed_order = 0;
    int retries_used = 0;
    std::int64_t latency_ms = 0;

    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct AgentTranscript {
    int stage = 0;
    std::vector<DecisionRecord> records;

    [[nodiscard]] const DecisionRecord* find(int period) const {
        const auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.period == period; });
        return it == records.end() ? nullptr : &*it;
    }
};

inline nlohmann::ordered_json to_json(const DecisionRecord& r) {
    nlohmann::ordered_json j;
    j["period"] = r.period;
    j["stage"] = r.stage;
    j["policy"] = r.policy;
    j["system_prompt_hash"] = r.system_prompt_hash;
    j["user_prompt"] = r.user_prompt;
    j["raw_completion"] = r.raw_completion;
    j["parsed_order"] = r.parsed_order;
    j["retries_used"] = r.retries_used;
    j["latency_ms"] = r.latency_ms;
    return j;
}

inline DecisionRecord decision_from_json(const nlohmann::json& j) {
    DecisionRecord r;
    r.period = j.at("period").get<int>();
    r.stage = j.at("stage").get<int>();
    r.policy = j.value("policy", "");
    r.system_prompt_hash = j.value("system_prompt_hash", "");
    r.user_prompt = j.value("user_prompt", "");
    r.raw_completion = j.value("raw_completion", "");
    r.parsed_order = j.at("parsed_order").get<Units>();
    r.retries_used = j.value("retries_used", 0);
    r.latency_ms = j.value("latency_ms", std::int64_t{0});
    if (r.parsed_order < 0) throw ConfigError("transcript record with negative parsed_order");
    return r;
}

/// Writes all stages' records interleaved by period then stage, one JSON
/// object per line.
inline void write_transcripts(const std::string& path, const std::array<AgentTranscript, kNumStages>& transcripts) {
    std::vector<const DecisionRecord*> all;
    for (const auto& t : transcripts)
        for (const auto& r : t.records) all.push_back(&r);
    std::stable_sort(all.begin(), all.end(), [](const auto* a, const auto* b) {
        return a->period != b->period ? a->period < b->period : a->stage < b->stage;
    });
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto* r : all) out << to_json(*r).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::array<AgentTranscript, kNumStages> read_transcripts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::array<AgentTranscript, kNumStages> out;
    for (int i = 0; i < kNumStages; ++i) out[static_cast<std::size_t>(i)].stage = i + 1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = decision_from_json(nlohmann::json::parse(line));
        check_stage(rec.stage);
        out[static_cast<std::size_t>(rec.stage - 1)].records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace beergame
