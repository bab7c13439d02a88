// beergame: run, analyze, replay and report Beer Distribution Game experiments.
//
// Exit codes: 0 success, 1 runtime or partial failure, 2 usage or config error.

#include <chrono>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "beergame/beergame.hpp"
#include "beergame/http_transport.hpp"

namespace bg = beergame;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

/// tracking_demand | match_demand | constant[:v] | panic:alpha,beta[,target]
std::unique_ptr<bg::Policy> make_cli_policy(const std::string& spec, const bg::GameConfig& config, int stage) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    std::vector<std::string> parts;
    for (std::size_t start = 0; !args.empty();) {
        const auto comma = args.find(',', start);
        parts.push_back(args.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    try {
        if (name == "tracking_demand" && parts.empty())
            return std::make_unique<bg::TrackingDemandPolicy>(bg::TrackingDemandPolicy::for_stage(config, stage));
        if (name == "match_demand" && parts.empty()) return std::make_unique<bg::ScriptedPolicy>(bg::MatchDemandRule{});
        if (name == "constant" && parts.size() <= 1) {
            const bg::Units v = parts.empty() ? 4 : std::stoll(parts[0]);
            if (v < 0) throw std::invalid_argument("negative");
            return std::make_unique<bg::ScriptedPolicy>(bg::ConstantRule{v});
        }
        if (name == "panic" && (parts.size() == 2 || parts.size() == 3)) {
            bg::PanicRule r{std::stod(parts[0]), std::stod(parts[1]), parts.size() == 3 ? std::stoll(parts[2]) : 12};
            return std::make_unique<bg::ScriptedPolicy>(r);
        }
    } catch (const std::logic_error&) {
    }
    throw bg::ConfigError("bad policy '" + spec +
                          "' (expected tracking_demand | match_demand | constant[:v] | panic:alpha,beta[,target])");
}

void print_summary(const bg::ExecutionSummary& s) {
    std::cout << "cells: planned " << s.planned << ", selected " << s.selected << ", skipped " << s.skipped
              << " (already complete), executed " << s.executed << ", complete " << s.completed << ", failed "
              << s.failed.size() << ", model calls " << s.model_calls << "\n";
    for (const auto& [id, reason] : s.failed) std::cout << "FAILED " << id << ": " << reason << "\n";
}

struct ExperimentArgs {
    std::string plan;
    std::string out;
    std::string mode = "stub";
    std::string from;
    std::string filter;
    int parallel = 1;
    std::optional<std::uint64_t> seed;
    int min_interval_ms = 0;
    bool quiet = false;
};

int run_experiment(bg::ExperimentPlan plan, const ExperimentArgs& a) {
    if (a.seed) plan.master_seed = *a.seed;
    bg::ExecuteOptions opt;
    opt.mode = bg::parse_mode(a.mode);
    opt.parallel = a.parallel;
    opt.filter = bg::CellFilter(a.filter);
    if (opt.mode == bg::RunMode::replay) {
        if (a.from.empty()) throw bg::ConfigError("--mode replay requires --from <recorded results root>");
        opt.replay_root = a.from;
    }
    std::unique_ptr<bg::RequestLimiter> limiter;
    std::unique_ptr<bg::HttpChatTransport> http;
    if (opt.mode == bg::RunMode::live) {
        limiter = std::make_unique<bg::RequestLimiter>(std::max(1, a.parallel),
                                                       std::chrono::milliseconds(a.min_interval_ms));
        http = std::make_unique<bg::HttpChatTransport>(*limiter);
        opt.live_transport = http.get();
    }
    if (!a.quiet)
        opt.progress = [](const bg::RunRecord& r, std::size_t done, std::size_t total) {
            std::cerr << "[" << done << "/" << total << "] " << r.key.id() << " "
                      << (r.status == bg::CellStatus::complete ? "complete" : "FAILED: " + r.reason) << "\n";
        };
    bg::ResultStore store(a.out);
    const auto summary = bg::execute(plan, store, opt);
    print_summary(summary);
    if (opt.mode == bg::RunMode::live && http)
        std::cout << "network requests: " << http->calls() << "\n";
    return summary.all_complete() ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beer Distribution Game laboratory: simulate, run experiments, analyze, replay, report"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "play one game with built-in policies and print its trace");
    std::vector<std::string> sim_policies{"tracking_demand"};
    std::uint64_t sim_seed = 1;
    std::string sim_regime = "isolated", sim_game, sim_out;
    sim->add_option("--policy", sim_policies,
                    "one spec for all stages or four, retailer first: tracking_demand | match_demand | "
                    "constant[:v] | panic:alpha,beta[,target]");
    sim->add_option("--seed", sim_seed, "demand seed");
    sim->add_option("--regime", sim_regime, "isolated | shared");
    sim->add_option("--game", sim_game, "JSON file with game parameters");
    sim->add_option("--out", sim_out, "write the trace here instead of stdout");

    // experiment
    ExperimentArgs ex;
    auto* exp = app.add_subcommand("experiment", "run every cell of a plan, resuming where a previous run stopped");
    exp->add_option("--plan", ex.plan, "plan file (JSON)")->required();
    exp->add_option("--out", ex.out, "results root")->required();
    exp->add_option("--mode", ex.mode, "live | stub | replay")->check(CLI::IsMember({"live", "stub", "replay"}));
    exp->add_option("--parallel", ex.parallel, "cells run concurrently")->check(CLI::PositiveNumber);
    exp->add_option("--seed", ex.seed, "override the plan's master seed");
    exp->add_option("--filter", ex.filter, "<config>/<regime>/<rep>, * matches anything");
    exp->add_option("--from,--replay-root", ex.from, "recorded results root (replay mode)");
    exp->add_option("--min-interval-ms", ex.min_interval_ms, "live mode: spacing between requests per endpoint");
    exp->add_flag("--quiet", ex.quiet, "no per-cell progress");

    // replay
    ExperimentArgs rp;
    rp.mode = "replay";
    auto* rep = app.add_subcommand("replay", "re-run a recorded experiment from its transcripts, without any model");
    rep->add_option("--from,--replay-root", rp.from, "recorded results root")->required();
    rep->add_option("--out", rp.out, "results root for the replayed cells")->required();
    rep->add_option("--parallel", rp.parallel, "cells run concurrently")->check(CLI::PositiveNumber);
    rep->add_option("--filter", rp.filter, "<config>/<regime>/<rep>, * matches anything");
    rep->add_flag("--quiet", rp.quiet, "no per-cell progress");

    // analyze
    std::string an_root;
    auto* ana = app.add_subcommand("analyze", "compute statistics over complete cells into <root>/analysis");
    ana->add_option("--out,root", an_root, "results root")->required();

    // report
    std::string rep_root;
    auto* rpt = app.add_subcommand("report", "write figure tables and SVGs into <root>/report");
    rpt->add_option("--out,root", rep_root, "results root")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            bg::GameConfig config;
            if (!sim_game.empty()) {
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(bg::read_file(sim_game));
                } catch (const nlohmann::json::parse_error& e) {
                    throw bg::ConfigError(sim_game + ": " + e.what());
                }
                config = bg::game_config_from_json(j);
            }
            if (sim_policies.size() != 1 && sim_policies.size() != bg::kNumStages)
                throw bg::ConfigError("--policy takes one spec or four");
            std::array<std::unique_ptr<bg::Policy>, bg::kNumStages> owned;
            bg::PolicySet set{};
            for (int i = 0; i < bg::kNumStages; ++i) {
                const auto& spec = sim_policies.size() == 1 ? sim_policies[0] : sim_policies[static_cast<std::size_t>(i)];
                owned[static_cast<std::size_t>(i)] = make_cli_policy(spec, config, i + 1);
                set[static_cast<std::size_t>(i)] = owned[static_cast<std::size_t>(i)].get();
            }
            const auto trace = bg::run_game(config, set, sim_seed, bg::parse_regime(sim_regime));
            if (sim_out.empty()) std::cout << bg::serialize_trace(trace);
            else bg::write_trace(sim_out, trace);
            std::cerr << "system cost " << bg::system_cost(trace).to_decimal_string() << "\n";
            return kOk;
        }
        if (*exp) return run_experiment(bg::load_plan(ex.plan), ex);
        if (*rep) {
            const auto recorded = bg::load_results(rp.from);
            return run_experiment(recorded.plan, rp);
        }
        if (*ana) {
            const auto rs = bg::load_results(an_root);
            const auto files = bg::analysis_files(rs);
            bg::write_files(fs::path(an_root) / "analysis", files);
            std::cout << "analysis: " << rs.complete_count() << " complete cells";
            const std::size_t failed = rs.cells.size() - rs.complete_count();
            if (failed) std::cout << ", " << failed << " failed cells excluded";
            if (rs.missing) std::cout << ", " << rs.missing << " cells not run";
            std::cout << "\n";
            const auto summary = nlohmann::json::parse(files.at("summary.json"));
            for (const auto& g : summary.at("groups")) {
                std::cout << "  " << g.at("configuration").get<std::string>() << " "
                          << g.at("regime").get<std::string>() << ": bullwhip p=" << g.at("bullwhip").at("p_value");
                if (!g.at("myopia").is_null()) std::cout << ", myopia p=" << g.at("myopia").at("p_value");
                std::cout << ", mean system cost " << g.at("cost").at("mean_system_cost") << "\n";
            }
            std::cout << "wrote " << (fs::path(an_root) / "analysis").string() << "\n";
            return kOk;
        }
        if (*rpt) {
            if (!fs::exists(fs::path(rep_root) / "analysis" / "summary.json"))
                throw bg::NoResults("run `analyze` first: " + (fs::path(rep_root) / "analysis").string() +
                                    " is missing");
            const auto rs = bg::load_results(rep_root);
            bg::write_files(fs::path(rep_root) / "report", bg::report_files(rs));
            std::cout << "wrote " << (fs::path(rep_root) / "report").string() << "\n";
            return kOk;
        }
    } catch (const bg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
