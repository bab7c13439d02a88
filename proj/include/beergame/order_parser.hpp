#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "beergame/sim.hpp"

namespace beergame {

struct OrderParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extracts the order from a model completion.
///
/// Bracket groups that contain no digit ("[note]", markdown links) are
/// ignored. Of the remaining groups the last one decides: it must be a plain
/// non-negative integer, optionally padded with whitespace and leading zeros.
/// "[-3]" or "[2.5]" as the last numeric group is an error, not a fallback
/// to an earlier group.
inline Units parse_order(std::string_view completion) {
    std::optional<std::string_view> last;
    std::size_t pos = 0;
    while ((pos = completion.find('[', pos)) != std::string_view::npos) {
        const std::size_t close = completion.find_first_of("[]", pos + 1);
        if (close == std::string_view::npos) break;
        if (completion[close] == '[') {  // unbalanced "[ ... [": restart at the inner bracket
            pos = close;
            continue;
        }
        const std::string_view inner = completion.substr(pos + 1, close - pos - 1);
        if (inner.find_first_of("0123456789") != std::string_view::npos) last = inner;
        pos = close + 1;
    }
    if (!last) throw OrderParseError("no bracketed integer in completion");

    std::string_view s = *last;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos)
        throw OrderParseError("bracketed value is not a non-negative integer: [" + std::string(*last) + "]");
    while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
    if (s.size() > 15) throw OrderParseError("bracketed integer too large: [" + std::string(*last) + "]");
    Units v = 0;
    for (const char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace beergame
