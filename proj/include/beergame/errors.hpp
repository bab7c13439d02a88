#pragma once

#include <stdexcept>
#include <string>

namespace beergame {

/// Delay lines or per-stage arrays of the wrong shape. Indicates corrupted
/// state; unreachable through the public API.
struct StructuralError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A policy produced an order the engine cannot accept.
struct DecisionError : std::runtime_error {
    DecisionError(int stage, int period, const std::string& what)
        : std::runtime_error("stage " + std::to_string(stage) + ", period " + std::to_string(period) + ": " + what),
          stage(stage), period(period) {}
    int stage;
    int period;
};

/// Replay requested a (stage, period) the transcript does not contain.
struct ReplayGapError : std::runtime_error {
    ReplayGapError(int stage, int period)
        : std::runtime_error("replay gap: no recorded decision for stage " + std::to_string(stage) + " at period " +
                             std::to_string(period)),
          stage(stage), period(period) {}
    int stage;
    int period;
};

/// Invalid arguments to a statistical routine (empty sample, k > n, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Configuration or plan content that fails validation.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace beergame
