#include "roleplan/design.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <cctype>

namespace roleplan {

std::string_view to_string(Design d) {
    switch (d) {
        case Design::A_single: return "A_single";
        case Design::B_two: return "B_two";
        case Design::C_three: return "C_three";
        case Design::D_four: return "D_four";
    }
    return "unknown";
}

Design parse_design(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto d : kAllDesigns) {
        std::string name(to_string(d));
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lowered == name || lowered == name.substr(0, 1)) return d;
    }
    throw ConfigError("unknown design '" + std::string(text) + "' (expected A, B, C or D)");
}

int agent_count(Design d) {
    return static_cast<int>(d) + 1;
}

} // namespace roleplan
