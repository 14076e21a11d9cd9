#pragma once

#include "roleplan/matcher.hpp"
#include "roleplan/plan.hpp"
#include "roleplan/scenario.hpp"
#include "roleplan/sdk.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace roleplan {

enum class ViolationClass {
    unknown_function,
    arity_mismatch,
    ungrounded_object,
    spatial_literal,
    precedence_violation,
    forbidden_mention,
    missing_required_object,
    definition_without_execution,
};

inline constexpr std::array kAllViolationClasses = {
    ViolationClass::unknown_function,     ViolationClass::arity_mismatch,   ViolationClass::ungrounded_object,
    ViolationClass::spatial_literal,      ViolationClass::precedence_violation, ViolationClass::forbidden_mention,
    ViolationClass::missing_required_object, ViolationClass::definition_without_execution,
};

std::string_view to_string(ViolationClass c);
ViolationClass parse_violation_class(std::string_view text);

struct Violation {
    ViolationClass cls;
    // Index into Plan::steps; empty for global violations.
    std::optional<std::size_t> step_index;
    std::optional<int> step_line;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

// How one object-typed argument was grounded against the inventory.
struct ArgumentGrounding {
    std::size_t step_index = 0;
    std::size_t arg_index = 0;
    bool grounded = false;
    bool generic = false;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<ArgumentGrounding> groundings;

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationClass c) const;
    std::map<ViolationClass, std::size_t> counts() const;

    // {"violations": [{"class", "step_line", "detail"}...], "counts": {...}}
    nlohmann::json to_json() const;
};

// Which parameter an argument binds to: keyword by name, otherwise by position.
const SdkParam* bound_param(const SdkFunction& fn, const ActionStep& step, std::size_t arg_index);

std::vector<Violation> validate_functions(const Plan& plan, const SdkSpec& sdk);

struct GroundingResult {
    std::vector<Violation> violations;
    std::vector<ArgumentGrounding> groundings;
};
GroundingResult validate_grounding(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario);

std::vector<Violation> detect_spatial_literals(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario);

// Throws MalformedDag when the scenario's constraints are cyclic.
std::vector<Violation> check_precedence(const Plan& plan, const ScenarioSpec& scenario);

std::vector<Violation> check_mentions(const Plan& plan, const ScenarioSpec& scenario);

std::vector<Violation> check_definitions(const Plan& plan);

// Index of the first step matching a precedence element, if any.
std::optional<std::size_t> first_occurrence(const Plan& plan, const PlanElement& element, const ObjectMatcher& matcher);

struct RuleOptions {
    std::set<ViolationClass> disabled;

    bool enabled(ViolationClass c) const { return !disabled.contains(c); }
};

// Runs every enabled rule. Violations are ordered by rule, then by step.
ValidationReport validate(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario, const RuleOptions& options = {});

} // namespace roleplan
