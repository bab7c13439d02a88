#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "beergame/config.hpp"
#include "beergame/observation.hpp"
#include "beergame/order_parser.hpp"
#include "beergame/prompts.hpp"
#include "beergame/rng.hpp"
#include "beergame/transcript.hpp"

namespace beergame {

enum class Tier { shallow, deep };
enum class Family { A, B };

inline std::string_view to_string(Tier t) { return t == Tier::shallow ? "shallow" : "deep"; }
inline std::string_view to_string(Family f) { return f == Family::A ? "A" : "B"; }
inline Tier parse_tier(std::string_view s) {
    if (s == "shallow") return Tier::shallow;
    if (s == "deep") return Tier::deep;
    throw ConfigError("unknown tier '" + std::string(s) + "' (expected shallow|deep)");
}
inline Family parse_family(std::string_view s) {
    if (s == "A") return Family::A;
    if (s == "B") return Family::B;
    throw ConfigError("unknown family '" + std::string(s) + "' (expected A|B)");
}

/// One chat model deployment. Model ids and endpoints are configuration;
/// credentials are read from the environment variable named by api_key_env
/// at request time and never stored.
struct ModelProfile {
    Tier tier = Tier::shallow;
    Family family = Family::A;
    std::string model_id;
    /// Full URL of an OpenAI-compatible chat-completions endpoint.
    std::string endpoint;
    std::string api_key_env = "BEERGAME_API_KEY";
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    double temperature = 1.0;
    int max_retries = 2;
    std::int64_t timeout_ms = 120000;
    /// First retry waits this long; each further retry doubles it.
    std::int64_t backoff_ms = 500;
};

struct ChatRequest {
    std::string model_id;
    double temperature = 1.0;
    std::string system;
    std::string user;
};

struct ChatResponse {
    std::string text;
    std::int64_t latency_ms = 0;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Retries were exhausted; the replication is invalid.
struct AgentFailure : std::runtime_error {
    AgentFailure(int stage, int period, int attempts, const std::string& last_error)
        : std::runtime_error("agent failure at stage " + std::to_string(stage) + ", period " + std::to_string(period) +
                             " after " + std::to_string(attempts) + " attempts: " + last_error),
          stage(stage), period(period), attempts(attempts) {}
    int stage;
    int period;
    int attempts;
};

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// Throws TransportError on network or protocol failure.
    virtual ChatResponse complete(const ModelProfile& profile, const ChatRequest& request) = 0;
};

/// Counts calls; useful for asserting that replay never reaches a model.
class CountingTransport : public ChatTransport {
public:
    [[nodiscard]] std::size_t calls() const { return calls_.load(); }

protected:
    void count() { ++calls_; }

private:
    std::atomic<std::size_t> calls_{0};
};

/// Returns canned responses in order; an entry starting with "!error" throws
/// a TransportError instead. Test fixture.
class ScriptedTransport final : public CountingTransport {
public:
    explicit ScriptedTransport(std::vector<std::string> responses) : responses_(std::move(responses)) {}

    ChatResponse complete(const ModelProfile&, const ChatRequest& request) override {
        count();
        std::lock_guard lock(mu_);
        requests_.push_back(request);
        if (next_ >= responses_.size()) throw TransportError("scripted transport exhausted");
        const std::string& r = responses_[next_++];
        if (r.rfind("!error", 0) == 0) throw TransportError(r);
        return {r, 0};
    }
    [[nodiscard]] const std::vector<ChatRequest>& requests() const { return requests_; }

private:
    std::mutex mu_;
    std::vector<std::string> responses_;
    std::vector<ChatRequest> requests_;
    std::size_t next_ = 0;
};

/// Offline stand-in for a chat model. Reads the quantities it needs back out
/// of the rendered prompt and answers with a supply-line-underweighting rule:
///
///     order = demand + alpha * max(target - on_hand + backlog, 0) - beta * supply_line + noise
///
/// where noise in {-1, 0, 1} is a hash of (seed, model id, prompt). The
/// output is a deterministic function of its inputs.
class StubChatModel final : public CountingTransport {
public:
    struct Behaviour {
        double alpha = 1.0;
        double beta = 0.2;
        Units target = 12;
    };

    StubChatModel(std::uint64_t seed, Behaviour shallow, Behaviour deep)
        : seed_(seed), shallow_(shallow), deep_(deep) {}

    ChatResponse complete(const ModelProfile& profile, const ChatRequest& request) override {
        count();
        const Behaviour& b = profile.tier == Tier::deep ? deep_ : shallow_;
        const std::string& u = request.user;
        const Units on_hand = number_after(u, "Current inventory (on-hand): ");
        const Units backlog = number_after(u, "Current backlog: ");
        const Units supply = number_after(u, "Supply line (units ordered but not yet received): ");
        const Units demand = u.find("The demand at the retailer (stage 1) is ") != std::string::npos
                                 ? number_after(u, "The demand at the retailer (stage 1) is ")
                                 : number_after(u, " for this round is ");
        const auto h = fnv1a64(u, fnv1a64(profile.model_id, SplitMix64::mix(seed_)));
        const int noise = static_cast<int>(SplitMix64::mix(h) % 3) - 1;
        const double gap = static_cast<double>(std::max<Units>(b.target - on_hand + backlog, 0));
        const double raw = static_cast<double>(demand) + b.alpha * gap - b.beta * static_cast<double>(supply) + noise;
        const auto order = static_cast<Units>(std::llround(std::max(raw, 0.0)));
        std::ostringstream text;
        text << "Demand " << demand << ", on-hand " << on_hand << ", backlog " << backlog << ", supply line "
             << supply << ". I will order [" << order << "]";
        return {text.str(), 0};
    }

private:
    static Units number_after(const std::string& text, std::string_view label) {
        const auto at = text.find(label);
        if (at == std::string::npos) throw TransportError("stub model: prompt lacks '" + std::string(label) + "'");
        std::size_t i = at + label.size();
        Units v = 0;
        bool any = false;
        for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
            v = v * 10 + (text[i] - '0');
            any = true;
        }
        if (!any) throw TransportError("stub model: no number after '" + std::string(label) + "'");
        return v;
    }

    std::uint64_t seed_;
    Behaviour shallow_;
    Behaviour deep_;
};

struct DecisionOutcome {
    std::string raw;
    Units order = 0;
    int retries_used = 0;
    std::int64_t latency_ms = 0;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

inline void default_sleep(std::chrono::milliseconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

/// Sends one decision request, retrying on transport and parse failures
/// with exponential backoff. Parse-failure retries append a format reminder
/// to the user message. Throws AgentFailure once max_retries is exhausted.
inline DecisionOutcome request_decision(ChatTransport& transport, const ModelProfile& profile,
                                        const std::string& system, const std::string& user, int stage = 0,
                                        int period = 0, const SleepFn& sleep = default_sleep) {
    if (profile.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    ChatRequest req{profile.model_id, profile.temperature, system, user};
    std::string last_error;
    std::int64_t latency = 0;
    for (int attempt = 0; attempt <= profile.max_retries; ++attempt) {
        if (attempt > 0) sleep(std::chrono::milliseconds(profile.backoff_ms << (attempt - 1)));
        try {
            ChatResponse resp = transport.complete(profile, req);
            latency += resp.latency_ms;
            try {
                const Units order = parse_order(resp.text);
                return {std::move(resp.text), order, attempt, latency};
            } catch (const OrderParseError& e) {
                last_error = e.what();
                req.user = user + "\n\n" + prompts::kFormatReminder;
            }
        } catch (const TransportError& e) {
            last_error = e.what();
        }
    }
    throw AgentFailure(stage, period, profile.max_retries + 1, last_error);
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return out;
}

/// Chat-model agent for one stage. Each round is a fresh two-message
/// conversation: the regime's system prompt plus the round's process prompt.
class LlmAgentPolicy final : public Policy {
public:
    LlmAgentPolicy(ModelProfile profile, ChatTransport& transport, Regime regime, const GameConfig& config,
                   int stage, SleepFn sleep = default_sleep)
        : profile_(std::move(profile)), transport_(&transport), regime_(regime),
          backlog_cost_(config.backlog_cost), holding_cost_(config.holding_cost), sleep_(std::move(sleep)),
          system_(prompts::build_system_prompt(regime)), system_hash_(hex64(fnv1a64(system_))) {
        transcript_.stage = stage;
    }

    PolicyDecision decide(const Observation& obs) override {
        const std::string user =
            prompts::build_process_prompt(obs, regime_, obs.period, kNumStages, backlog_cost_, holding_cost_);
        DecisionOutcome out = request_decision(*transport_, profile_, system_, user, obs.stage, obs.period, sleep_);
        DecisionRecord rec;
        rec.period = obs.period;
        rec.stage = obs.stage;
        rec.policy = id();
        rec.system_prompt_hash = system_hash_;
        rec.user_prompt = user;
        rec.raw_completion = out.raw;
        rec.parsed_order = out.order;
        rec.retries_used = out.retries_used;
        rec.latency_ms = out.latency_ms;
        transcript_.records.push_back(std::move(rec));
        return {out.order, std::move(out.raw)};
    }

    [[nodiscard]] std::string id() const override {
        return "llm:" + std::string(to_string(profile_.tier)) + ":" + profile_.model_id;
    }
    [[nodiscard]] const AgentTranscript& transcript() const { return transcript_; }

private:
    ModelProfile profile_;
    ChatTransport* transport_;
    Regime regime_;
    Rational backlog_cost_;
    Rational holding_cost_;
    SleepFn sleep_;
    std::string system_;
    std::string system_hash_;
    AgentTranscript transcript_;
};

}  // namespace beergame
