#pragma once

#include <array>
#include <string>
#include <string_view>

namespace roleplan {

// Pipeline architectures, from one agent doing everything to four specialised agents.
enum class Design { A_single, B_two, C_three, D_four };

inline constexpr std::array kAllDesigns = {Design::A_single, Design::B_two, Design::C_three, Design::D_four};

std::string_view to_string(Design d);

// Accepts "A".."D" or the full names, case-insensitively. Throws ConfigError.
Design parse_design(std::string_view text);

int agent_count(Design d);

} // namespace roleplan
