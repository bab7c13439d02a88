#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "beergame/game.hpp"
#include "beergame/gateway.hpp"
#include "beergame/plan.hpp"
#include "beergame/trace_io.hpp"
#include "beergame/transcript.hpp"

namespace beergame {

// Store layout under the output root:
//
//   manifest.json                          plan hash, mode and canonical plan
//   cells/<config>__<regime>__r<NNN>/
//       trace.jsonl                        TeamTrace (complete cells only)
//       transcript.jsonl                   every decision, period-major
//       status.json                        written last; marks the cell done
//
// A cell counts as complete only when status.json says so. Files are
// written to a temporary name and renamed into place.

namespace fs = std::filesystem;

enum class RunMode { live, stub, replay };

inline std::string_view to_string(RunMode m) {
    switch (m) {
        case RunMode::live: return "live";
        case RunMode::stub: return "stub";
        case RunMode::replay: return "replay";
    }
    return "?";
}

inline RunMode parse_mode(std::string_view s) {
    if (s == "live") return RunMode::live;
    if (s == "stub") return RunMode::stub;
    if (s == "replay") return RunMode::replay;
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected live|stub|replay)");
}

struct CellKey {
    std::string configuration;
    Regime regime = Regime::isolated;
    int replication = 0;

    [[nodiscard]] std::string id() const {
        std::string rep = std::to_string(replication);
        if (rep.size() < 3) rep.insert(0, 3 - rep.size(), '0');
        return configuration + "__" + std::string(to_string(regime)) + "__r" + rep;
    }
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

/// Cells in plan order: configuration, then regime, then replication.
inline std::vector<CellKey> plan_cells(const ExperimentPlan& plan) {
    std::vector<CellKey> out;
    out.reserve(plan.cell_count());
    for (const auto& c : plan.configurations)
        for (const Regime r : plan.regimes)
            for (int rep = 0; rep < plan.replications; ++rep) out.push_back({c.name, r, rep});
    return out;
}

/// "<config>/<regime>/<rep>"; missing or "*" components match anything.
class CellFilter {
public:
    CellFilter() = default;
    explicit CellFilter(const std::string& pattern) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const auto slash = pattern.find('/', start);
            parts.push_back(pattern.substr(start, slash == std::string::npos ? std::string::npos : slash - start));
            if (slash == std::string::npos) break;
            start = slash + 1;
        }
        if (parts.size() > 3) throw ConfigError("--filter: expected <config>/<regime>/<rep>, got '" + pattern + "'");
        parts.resize(3);
        config_ = parts[0];
        regime_ = parts[1];
        if (!regime_.empty() && regime_ != "*") (void)parse_regime(regime_);
        if (!parts[2].empty() && parts[2] != "*") {
            try {
                std::size_t used = 0;
                rep_ = std::stoi(parts[2], &used);
                if (used != parts[2].size() || *rep_ < 0) throw std::invalid_argument("rep");
            } catch (const std::exception&) {
                throw ConfigError("--filter: replication must be a non-negative integer or *, got '" + parts[2] + "'");
            }
        }
    }

    [[nodiscard]] bool matches(const CellKey& k) const {
        if (!config_.empty() && config_ != "*" && config_ != k.configuration) return false;
        if (!regime_.empty() && regime_ != "*" && regime_ != to_string(k.regime)) return false;
        if (rep_ && *rep_ != k.replication) return false;
        return true;
    }

private:
    std::string config_;
    std::string regime_;
    std::optional<int> rep_;
};

enum class CellStatus { complete, failed };

/// One executed cell. `trace` is set only for complete cells.
struct RunRecord {
    std::string plan_hash;
    CellKey key;
    std::uint64_t seed = 0;         ///< cell seed
    std::uint64_t demand_seed = 0;  ///< shared by every cell of the replication
    std::optional<TeamTrace> trace;
    std::array<AgentTranscript, kNumStages> transcripts{};
    CellStatus status = CellStatus::failed;
    std::string reason;
};

/// Raised for problems that invalidate one cell but not the run.
struct CellFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- storage

inline void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string transcripts_text(const std::array<AgentTranscript, kNumStages>& transcripts) {
    std::vector<const DecisionRecord*> all;
    for (const auto& t : transcripts)
        for (const auto& r : t.records) all.push_back(&r);
    std::stable_sort(all.begin(), all.end(), [](const auto* a, const auto* b) {
        return a->period != b->period ? a->period < b->period : a->stage < b->stage;
    });
    std::string out;
    for (const auto* r : all) out += to_json(*r).dump() + '\n';
    return out;
}

class ResultStore {
public:
    explicit ResultStore(fs::path root) : root_(std::move(root)) {}

    [[nodiscard]] const fs::path& root() const { return root_; }
    [[nodiscard]] fs::path manifest_path() const { return root_ / "manifest.json"; }
    [[nodiscard]] fs::path cell_dir(const CellKey& k) const { return root_ / "cells" / k.id(); }

    /// Creates the manifest, or checks that an existing one describes the
    /// same plan and mode.
    void open(const ExperimentPlan& plan, RunMode mode) {
        fs::create_directories(root_ / "cells");
        const std::string hash = plan_hash(plan);
        if (fs::exists(manifest_path())) {
            const auto m = nlohmann::json::parse(read_file(manifest_path().string()));
            if (m.value("plan_hash", "") != hash)
                throw ConfigError("output root " + root_.string() + " holds results of a different plan (hash " +
                                  m.value("plan_hash", "?") + ", this plan " + hash + ")");
            if (m.value("mode", "") != to_string(mode))
                throw ConfigError("output root " + root_.string() + " was produced in mode " + m.value("mode", "?"));
            return;
        }
        nlohmann::ordered_json m;
        m["schema"] = "beergame.manifest.v1";
        m["plan_hash"] = hash;
        m["mode"] = to_string(mode);
        m["cells"] = plan.cell_count();
        m["plan"] = to_json(plan);
        write_file_atomic(manifest_path(), m.dump(2) + "\n");
    }

    [[nodiscard]] bool is_complete(const CellKey& k, const std::string& hash) const {
        const fs::path status = cell_dir(k) / "status.json";
        if (!fs::exists(status)) return false;
        try {
            const auto j = nlohmann::json::parse(read_file(status.string()));
            return j.value("status", "") == "complete" && j.value("plan_hash", "") == hash &&
                   fs::exists(cell_dir(k) / "trace.jsonl");
        } catch (const nlohmann::json::exception&) {
            return false;
        }
    }

    void save(const RunRecord& r) const {
        const fs::path dir = cell_dir(r.key);
        fs::create_directories(dir);
        fs::remove(dir / "status.json");
        if (r.trace) write_file_atomic(dir / "trace.jsonl", serialize_trace(*r.trace));
        else fs::remove(dir / "trace.jsonl");
        write_file_atomic(dir / "transcript.jsonl", transcripts_text(r.transcripts));
        nlohmann::ordered_json s;
        s["cell"] = r.key.id();
        s["configuration"] = r.key.configuration;
        s["regime"] = to_string(r.key.regime);
        s["replication"] = r.key.replication;
        s["seed"] = r.seed;
        s["demand_seed"] = r.demand_seed;
        s["plan_hash"] = r.plan_hash;
        s["status"] = r.status == CellStatus::complete ? "complete" : "failed";
        if (r.status == CellStatus::failed) s["reason"] = r.reason;
        write_file_atomic(dir / "status.json", s.dump(2) + "\n");
    }

private:
    fs::path root_;
};

// ---------------------------------------------------------------- execution

struct ExecuteOptions {
    RunMode mode = RunMode::stub;
    int parallel = 1;
    CellFilter filter;
    /// Root of a previous run whose transcripts replay mode plays back.
    fs::path replay_root;
    /// Required in live mode. Must be safe to call from several threads.
    ChatTransport* live_transport = nullptr;
    /// Called once per executed cell, serialized.
    std::function<void(const RunRecord&, std::size_t done, std::size_t total)> progress;
    SleepFn sleep = default_sleep;
};

struct ExecutionSummary {
    std::size_t planned = 0;   ///< cells in the plan
    std::size_t selected = 0;  ///< cells passing the filter
    std::size_t skipped = 0;   ///< already complete
    std::size_t executed = 0;
    std::size_t completed = 0;
    std::vector<std::pair<std::string, std::string>> failed;  ///< (cell id, reason)
    std::size_t model_calls = 0;

    [[nodiscard]] bool all_complete() const { return failed.empty(); }
};

namespace detail {

inline std::unique_ptr<Policy> make_policy(const AgentSpec& spec, const GameConfig& config, int stage, Regime regime,
                                           ChatTransport* transport, const SleepFn& sleep) {
    switch (spec.kind) {
        case AgentKind::llm:
            if (transport == nullptr) throw ConfigError("llm agent without a transport");
            return std::make_unique<LlmAgentPolicy>(spec.profile, *transport, regime, config, stage, sleep);
        case AgentKind::tracking_demand:
            return std::make_unique<TrackingDemandPolicy>(TrackingDemandPolicy::for_stage(config, stage));
        default: return std::make_unique<ScriptedPolicy>(spec.rule);
    }
}

}  // namespace detail

/// Plays one cell. Agent-level failures come back as a failed record;
/// anything else propagates.
inline RunRecord run_cell(const ExperimentPlan& plan, const std::string& hash, const CellKey& key,
                          const ExecuteOptions& opt, std::size_t* model_calls = nullptr) {
    RunRecord rec;
    rec.plan_hash = hash;
    rec.key = key;
    rec.seed = derive_seed(plan.master_seed, key.configuration, key.regime, key.replication);
    rec.demand_seed = demand_seed(plan.master_seed, key.replication);
    for (int i = 0; i < kNumStages; ++i) rec.transcripts[static_cast<std::size_t>(i)].stage = i + 1;

    const auto conf = std::find_if(plan.configurations.begin(), plan.configurations.end(),
                                   [&](const auto& c) { return c.name == key.configuration; });
    if (conf == plan.configurations.end()) throw ConfigError("cell " + key.id() + " is not in the plan");

    std::unique_ptr<StubChatModel> stub;
    ChatTransport* transport = opt.live_transport;
    if (opt.mode == RunMode::stub) {
        stub = std::make_unique<StubChatModel>(rec.seed, plan.stub_shallow, plan.stub_deep);
        transport = stub.get();
    }

    std::array<std::unique_ptr<Policy>, kNumStages> owned;
    std::array<bool, kNumStages> from_model{};
    try {
        std::array<AgentTranscript, kNumStages> recorded;
        if (opt.mode == RunMode::replay) {
            const fs::path src = opt.replay_root / "cells" / key.id() / "transcript.jsonl";
            if (!fs::exists(src)) throw CellFailure("replay source missing: " + src.string());
            recorded = read_transcripts(src.string());
        }
        for (int i = 1; i <= kNumStages; ++i) {
            const auto idx = static_cast<std::size_t>(i - 1);
            if (opt.mode == RunMode::replay) {
                auto& t = recorded[idx];
                const std::string id = t.records.empty() ? std::string() : t.records.front().policy;
                owned[idx] = std::make_unique<ReplayPolicy>(std::move(t), id);
            } else {
                const AgentSpec& spec = plan.agent(conf->tiers[idx]);
                owned[idx] = detail::make_policy(spec, plan.game, i, key.regime, transport, opt.sleep);
                from_model[idx] = spec.kind == AgentKind::llm;
            }
        }
    } catch (const CellFailure& e) {
        rec.reason = e.what();
        return rec;
    }

    PolicySet set{};
    for (std::size_t i = 0; i < kNumStages; ++i) set[i] = owned[i].get();

    // Non-model policies are logged through the hook so that every cell,
    // scripted or not, can be replayed.
    auto hook = [&](const Observation& obs, const PolicyDecision& d) {
        const auto idx = static_cast<std::size_t>(obs.stage - 1);
        if (from_model[idx]) return;
        DecisionRecord r;
        r.period = obs.period;
        r.stage = obs.stage;
        r.policy = owned[idx]->id();
        r.raw_completion = d.rationale;
        r.parsed_order = d.order;
        rec.transcripts[idx].records.push_back(std::move(r));
    };
    auto collect_model_transcripts = [&] {
        for (std::size_t i = 0; i < kNumStages; ++i)
            if (from_model[i]) rec.transcripts[i] = static_cast<LlmAgentPolicy&>(*owned[i]).transcript();
    };

    try {
        rec.trace = run_game(plan.game, set, rec.demand_seed, key.regime, hook);
        rec.status = CellStatus::complete;
    } catch (const AgentFailure& e) {
        rec.reason = e.what();
    } catch (const TransportError& e) {
        rec.reason = e.what();
    } catch (const DecisionError& e) {
        rec.reason = e.what();
    } catch (const ReplayGapError& e) {
        rec.reason = e.what();
    }
    collect_model_transcripts();
    if (stub && model_calls) *model_calls += stub->calls();
    return rec;
}

/// Runs every selected cell not already complete, persisting each as it
/// finishes. Storage errors abort the run after in-flight cells finish;
/// cells already written stay valid.
inline ExecutionSummary execute(const ExperimentPlan& plan, ResultStore& store, const ExecuteOptions& opt) {
    if (opt.mode == RunMode::replay && opt.replay_root.empty())
        throw ConfigError("replay mode requires a transcript root");
    if (opt.mode == RunMode::live && plan.uses_llm()) {
        if (opt.live_transport == nullptr) throw ConfigError("live mode requires a transport");
        for (const AgentSpec* a : {&plan.shallow, &plan.deep})
            if (a->kind == AgentKind::llm && a->profile.endpoint.empty())
                throw ConfigError("live mode: agents." + std::string(to_string(a->profile.tier)) +
                                  ".endpoint is not set");
    }
    plan.game.validate();
    store.open(plan, opt.mode);
    const std::string hash = plan_hash(plan);

    ExecutionSummary summary;
    const auto cells = plan_cells(plan);
    summary.planned = cells.size();
    std::vector<CellKey> todo;
    for (const auto& c : cells) {
        if (!opt.filter.matches(c)) continue;
        ++summary.selected;
        if (store.is_complete(c, hash)) ++summary.skipped;
        else todo.push_back(c);
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr error;
    std::vector<std::optional<RunRecord>> results(todo.size());

    auto worker = [&] {
        for (;;) {
            if (abort.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            try {
                std::size_t calls = 0;
                RunRecord rec = run_cell(plan, hash, todo[i], opt, &calls);
                store.save(rec);
                std::lock_guard lock(mu);
                summary.model_calls += calls;
                ++summary.executed;
                if (rec.status == CellStatus::complete) ++summary.completed;
                if (opt.progress) opt.progress(rec, summary.executed, todo.size());
                results[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                abort = true;
                return;
            }
        }
    };

    const int threads = std::max(1, std::min<int>(opt.parallel, static_cast<int>(todo.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    for (const auto& r : results)
        if (r && r->status == CellStatus::failed) summary.failed.emplace_back(r->key.id(), r->reason);
    return summary;
}

// ---------------------------------------------------------------- loading

struct StoredCell {
    CellKey key;
    CellStatus status = CellStatus::failed;
    std::string reason;
    std::uint64_t seed = 0;
    std::optional<TeamTrace> trace;
};

struct ResultSet {
    ExperimentPlan plan;
    std::string plan_hash;
    RunMode mode = RunMode::stub;
    std::vector<StoredCell> cells;  ///< plan order; cells never run are absent
    std::size_t missing = 0;

    [[nodiscard]] std::size_t complete_count() const {
        return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) {
            return c.status == CellStatus::complete;
        }));
    }
};

inline ResultSet load_results(const fs::path& root) {
    ResultStore store(root);
    if (!fs::exists(store.manifest_path())) throw std::runtime_error("no manifest.json under " + root.string());
    const auto m = nlohmann::json::parse(read_file(store.manifest_path().string()));
    ResultSet rs;
    rs.plan = plan_from_json(m.at("plan"));
    rs.plan_hash = m.at("plan_hash").get<std::string>();
    rs.mode = parse_mode(m.at("mode").get<std::string>());
    if (plan_hash(rs.plan) != rs.plan_hash) throw std::runtime_error("manifest plan does not match its hash");
    for (const auto& key : plan_cells(rs.plan)) {
        const fs::path dir = store.cell_dir(key);
        if (!fs::exists(dir / "status.json")) {
            ++rs.missing;
            continue;
        }
        const auto s = nlohmann::json::parse(read_file((dir / "status.json").string()));
        StoredCell c;
        c.key = key;
        c.seed = s.value("seed", std::uint64_t{0});
        if (s.value("plan_hash", "") != rs.plan_hash) throw std::runtime_error(key.id() + ": stale plan hash");
        if (s.value("status", "") == "complete") {
            c.status = CellStatus::complete;
            c.trace = read_trace((dir / "trace.jsonl").string());
            if (c.trace->periods.size() != static_cast<std::size_t>(c.trace->config.horizon))
                throw std::runtime_error(key.id() + ": complete cell with a truncated trace");
        } else {
            c.reason = s.value("reason", "");
        }
        rs.cells.push_back(std::move(c));
    }
    return rs;
}

}  // namespace beergame
