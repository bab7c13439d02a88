#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beergame/observation.hpp"

namespace fixtures {

using namespace beergame;

/// Golden file contents without the trailing newline.
inline std::string golden(const std::string& name) {
    std::ifstream in(std::string(BEERGAME_GOLDEN_DIR) + "/" + name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    std::string text = s.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

/// Round 7 fixture. Net inventories (5, -3, 0, 14).
inline Observation prompt_fixture(int stage, Regime regime) {
    struct Row {
        Units inv, arriving, incoming, supply;
        int lead;
        std::vector<Units> orders, incomings;
    };
    const Row rows[] = {
        {5, 4, 6, 11, 2, {4, 4, 5, 6, 7, 3}, {4, 3, 6, 2, 8, 5}},
        {-3, 2, 9, 8, 2, {4, 6, 2, 0, 5, 1}, {4, 4, 7, 3, 10, 6}},
        {0, 0, 9, 0, 2, {4, 4, 0, 0, 0, 0}, {4, 5, 5, 8, 12, 9}},
        {14, 6, 3, 15, 3, {4, 4, 4, 6, 5, 4}, {4, 4, 2, 1, 0, 3}},
    };
    const Row& r = rows[stage - 1];
    Observation o;
    o.period = 7;
    o.stage = stage;
    o.regime = regime;
    o.own_inventory = r.inv;
    o.own_backlog = std::max<Units>(-r.inv, 0);
    o.arriving_now = r.arriving;
    o.incoming_demand = r.incoming;
    o.supply_line = r.supply;
    o.lead_time = r.lead;
    o.past_orders = r.orders;
    o.past_incoming = r.incomings;
    if (regime == Regime::shared) o.shared_view = SharedView{{5, 0, 0, 14}, {0, 3, 0, 0}};
    return o;
}

}  // namespace fixtures
