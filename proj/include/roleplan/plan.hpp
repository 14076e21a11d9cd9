#pragma once

#include "roleplan/sdk.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

struct Argument {
    // Exactly as written, including any keyword prefix: color="red"
    std::string raw_text;
    ParamType inferred_type = ParamType::none;
    std::optional<std::string> keyword;
    // Value with quotes removed for string literals; otherwise the literal text.
    std::string value;
    bool quoted = false;
    // number: one entry; coordinate tuple/list: two or more.
    std::vector<double> numbers;
    bool is_call = false;
};

struct ActionStep {
    // Final segment of a dotted name: robot.pick_up(...) -> pick_up
    std::string function;
    std::vector<Argument> args;
    // 1-based line in the raw model output.
    int source_line = 0;
    // Trimmed text of the logical line the call sits on (physical lines joined by '\n').
    std::string source_text;
    // Innermost plan-local `def` the call sits in, if any.
    std::optional<std::string> enclosing_definition;
    // False for calls inside a local def that nothing executed ever invokes.
    bool executed = true;
};

struct PlanDefinition {
    std::string name;
    int source_line = 0;
    bool invoked = false;
};

struct ResidueLine {
    int source_line = 0;
    std::string text;
};

struct Plan {
    std::vector<ActionStep> steps;
    std::vector<ResidueLine> residue;
    std::vector<PlanDefinition> definitions;

    bool defines(std::string_view name) const;
};

// Extracts the last fenced code block (or the whole text when there is none) and
// recognizes call expressions in it. Never throws: unparseable text becomes residue.
Plan parse_plan(std::string_view raw);

// Trimmed, non-blank lines of the code region, joined by '\n'.
std::string code_region(std::string_view raw);

// Steps and residue re-emitted in source order; equals code_region() of the parsed text.
std::string serialize_plan(const Plan& plan);

// Lower-case color names the parser tags as color literals.
bool is_color_word(std::string_view word);

} // namespace roleplan
