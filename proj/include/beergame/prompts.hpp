#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "beergame/config.hpp"
#include "beergame/observation.hpp"

namespace beergame::prompts {

// Templates are frozen; tests/golden holds the expected renderings.

inline constexpr const char* kSystemIsolated =
    "You have NO VISIBILITY into the inventory or backlog levels at other stages of the supply chain. "
    "You must make decisions solely based on your own local state (demand, inventory, backlog, and arriving "
    "deliveries).";

inline constexpr const char* kSystemShared =
    "IMPORTANT NOTE: You have FULL VISIBILITY of the inventory and backlog levels across ALL stages -- retailer, "
    "wholesaler, distributor, and manufacturer. Please use this shared information to make globally optimal "
    "decisions.";

inline constexpr const char* kIsolatedNotice =
    "You have no visibility into the inventory or backlog levels at other stages. Please make your decision solely "
    "based on your own current state and local information.";

inline constexpr const char* kSharedNotice =
    "IMPORTANT NOTE: You have FULL VISIBILITY of the inventory and backlog levels across ALL stages. Please "
    "thoroughly review this information before making your decision.";

/// Number of past incoming demands listed in the state description.
inline constexpr std::size_t kDemandHistoryShown = 3;

struct PromptError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline std::string build_system_prompt(Regime regime) {
    return regime == Regime::isolated ? kSystemIsolated : kSystemShared;
}

namespace detail {

inline std::string join_tail(const std::vector<Units>& values, std::size_t count) {
    if (values.empty()) return "none";
    const std::size_t start = values.size() > count ? values.size() - count : 0;
    std::string out;
    for (std::size_t i = start; i < values.size(); ++i) {
        if (i != start) out += ", ";
        out += std::to_string(values[i]);
    }
    return out;
}

inline std::string four_values(const StageArray& v) {
    return std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]) + ", and " +
           std::to_string(v[3]);
}

}  // namespace detail

/// Labeled block describing the stage's own position, in a fixed order:
/// on-hand, backlog, arriving delivery, recent own orders, supply line,
/// recent incoming demands. Histories list oldest first.
inline std::string state_description(const Observation& obs) {
    const auto lead = static_cast<std::size_t>(obs.lead_time);
    std::string out;
    out += "- Current inventory (on-hand): " + std::to_string(obs.on_hand()) + "\n";
    out += "- Current backlog: " + std::to_string(obs.own_backlog) + "\n";
    out += "- Arriving delivery this round: " + std::to_string(obs.arriving_now) + "\n";
    out += "- Your last " + std::to_string(lead) + " orders placed (oldest first): " +
           detail::join_tail(obs.past_orders, lead) + "\n";
    out += "- Supply line (units ordered but not yet received): " + std::to_string(obs.supply_line) + "\n";
    out += "- Last " + std::to_string(kDemandHistoryShown) + " incoming demands (oldest first): " +
           detail::join_tail(obs.past_incoming, kDemandHistoryShown);
    return out;
}

/// Per-round user message. `round_display` is 1-based.
inline std::string build_process_prompt(const Observation& obs, Regime regime, int round_display, int num_stages,
                                        const Rational& backlog_cost = Rational(1),
                                        const Rational& holding_cost = Rational(1, 2)) {
    if (obs.regime != regime) throw PromptError("observation regime does not match prompt regime");
    if (regime == Regime::shared && !obs.shared_view) throw PromptError("shared regime requires the shared view");
    if (regime == Regime::isolated && obs.shared_view) throw PromptError("isolated observation carries shared view");
    if (obs.stage < 1 || obs.stage > num_stages) throw PromptError("stage outside the chain");

    std::string out = "Now this is round " + std::to_string(round_display) + ", and you are at stage " +
                      std::to_string(obs.stage) + " of " + std::to_string(num_stages) + " in the supply chain.\n\n";
    if (regime == Regime::isolated) {
        out += std::string(kIsolatedNotice) + "\n\n";
    } else {
        out += std::string(kSharedNotice) + "\n\n";
        out += "The inventory levels of retailer, wholesaler, distributor, and manufacturer are " +
               detail::four_values(obs.shared_view->on_hand) + " respectively.\n\n";
        out += "The current backlog levels of retailer, wholesaler, distributor, and manufacturer are: " +
               detail::four_values(obs.shared_view->backlog) + " respectively.\n\n";
    }
    if (obs.stage == 1) {
        out += "The demand at the retailer (stage 1) is " + std::to_string(obs.incoming_demand) + ".\n\n";
    }
    out += "Given your current state:\n" + state_description(obs) + "\n\n";
    if (obs.stage != 1) {
        out += "Your downstream order from stage " + std::to_string(obs.stage - 1) + " for this round is " +
               std::to_string(obs.incoming_demand) + ".\n\n";
    }
    out += "What is your action (order quantity) for this round? Your aim is to minimize the cost, where one unit of "
           "backlog costs " +
           backlog_cost.to_decimal_string() + " and one unit of inventory costs " + holding_cost.to_decimal_string() +
           ". Please provide your action as a non-negative integer within brackets at the end of your response "
           "(e.g., [0]).";
    return out;
}

inline constexpr const char* kFormatReminder =
    "Reminder: end your response with your order quantity as a non-negative integer within brackets, e.g. [4].";

}  // namespace beergame::prompts
