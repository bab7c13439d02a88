#pragma once

// Live chat-completions transport. Kept out of beergame.hpp so that only
// the CLI pulls in cpp-httplib.

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "beergame/gateway.hpp"

namespace beergame {

struct EndpointUrl {
    std::string scheme_host_port;  // "https://api.example.com:443"
    std::string path;              // "/v1/chat/completions"
};

inline EndpointUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

/// Bounds in-flight requests globally and spaces requests per endpoint.
class RequestLimiter {
public:
    RequestLimiter(int max_in_flight, std::chrono::milliseconds min_interval_per_endpoint)
        : max_in_flight_(max_in_flight < 1 ? 1 : max_in_flight), min_interval_(min_interval_per_endpoint) {}

    class Slot {
    public:
        explicit Slot(RequestLimiter& owner) : owner_(owner) {}
        Slot(const Slot&) = delete;
        Slot& operator=(const Slot&) = delete;
        ~Slot() { owner_.release(); }

    private:
        RequestLimiter& owner_;
    };

    [[nodiscard]] Slot acquire(const std::string& endpoint) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
        ++in_flight_;
        auto& next = next_allowed_[endpoint];
        const auto now = std::chrono::steady_clock::now();
        const auto start = std::max(now, next);
        next = start + min_interval_;
        lock.unlock();
        std::this_thread::sleep_until(start);
        return Slot(*this);
    }

private:
    void release() {
        {
            std::lock_guard lock(mu_);
            --in_flight_;
        }
        cv_.notify_one();
    }

    std::mutex mu_;
    std::condition_variable cv_;
    int max_in_flight_;
    int in_flight_ = 0;
    std::chrono::milliseconds min_interval_;
    std::map<std::string, std::chrono::steady_clock::time_point> next_allowed_;
};

/// OpenAI-style chat-completions over HTTP(S): POST {model, temperature,
/// messages:[system, user]} and read choices[0].message.content.
class HttpChatTransport final : public CountingTransport {
public:
    explicit HttpChatTransport(RequestLimiter& limiter) : limiter_(limiter) {}

    static nlohmann::json request_body(const ChatRequest& req) {
        return {{"model", req.model_id},
                {"temperature", req.temperature},
                {"messages",
                 {{{"role", "system"}, {"content", req.system}}, {{"role", "user"}, {"content", req.user}}}}};
    }

    static std::string extract_content(const std::string& body) {
        try {
            const auto j = nlohmann::json::parse(body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("unexpected response shape: ") + e.what());
        }
    }

    ChatResponse complete(const ModelProfile& profile, const ChatRequest& request) override {
        count();
        const EndpointUrl url = split_url(profile.endpoint);
        httplib::Client client(url.scheme_host_port);
        const auto timeout = std::chrono::milliseconds(profile.timeout_ms);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());

        httplib::Headers headers;
        if (!profile.api_key_env.empty()) {
            if (const char* key = std::getenv(profile.api_key_env.c_str()); key != nullptr && *key != '\0')
                headers.emplace(profile.auth_header, profile.auth_prefix + key);
        }

        const auto slot = limiter_.acquire(url.scheme_host_port);
        const auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(url.path, headers, request_body(request).dump(), "application/json");
        const auto latency =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        if (!res) throw TransportError("HTTP error: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw TransportError("HTTP status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        return {extract_content(res->body), latency};
    }

private:
    RequestLimiter& limiter_;
};

}  // namespace beergame
