#include "roleplan/validation.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roleplan {

std::string_view to_string(ViolationClass c) {
    switch (c) {
        case ViolationClass::unknown_function: return "unknown_function";
        case ViolationClass::arity_mismatch: return "arity_mismatch";
        case ViolationClass::ungrounded_object: return "ungrounded_object";
        case ViolationClass::spatial_literal: return "spatial_literal";
        case ViolationClass::precedence_violation: return "precedence_violation";
        case ViolationClass::forbidden_mention: return "forbidden_mention";
        case ViolationClass::missing_required_object: return "missing_required_object";
        case ViolationClass::definition_without_execution: return "definition_without_execution";
    }
    return "unknown";
}

ViolationClass parse_violation_class(std::string_view text) {
    for (auto c : kAllViolationClasses)
        if (to_string(c) == text) return c;
    throw SchemaError("class", "unknown violation class '" + std::string(text) + "'");
}

std::size_t ValidationReport::count(ViolationClass c) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(), [&](const auto& v) { return v.cls == c; }));
}

std::map<ViolationClass, std::size_t> ValidationReport::counts() const {
    std::map<ViolationClass, std::size_t> out;
    for (auto c : kAllViolationClasses) out[c] = 0;
    for (const auto& v : violations) ++out[v.cls];
    return out;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& v : violations) {
        list.push_back({
            {"class", to_string(v.cls)},
            {"step_line", v.step_line ? nlohmann::json(*v.step_line) : nlohmann::json(nullptr)},
            {"detail", v.detail},
        });
    }
    nlohmann::json counts_json = nlohmann::json::object();
    for (const auto& [cls, n] : counts()) counts_json[std::string(to_string(cls))] = n;
    return {{"violations", list}, {"counts", counts_json}};
}

const SdkParam* bound_param(const SdkFunction& fn, const ActionStep& step, std::size_t arg_index) {
    const Argument& arg = step.args.at(arg_index);
    if (arg.keyword) {
        auto it = std::find_if(fn.params.begin(), fn.params.end(), [&](const auto& p) { return p.name == *arg.keyword; });
        return it == fn.params.end() ? nullptr : &*it;
    }
    return arg_index < fn.params.size() ? &fn.params[arg_index] : nullptr;
}

namespace {

Violation at_step(ViolationClass cls, const Plan& plan, std::size_t i, std::string detail) {
    return Violation{cls, i, plan.steps[i].source_line, std::move(detail)};
}

bool known_coordinate(const Coordinate& c, const ScenarioSpec& scenario) {
    return std::any_of(scenario.known_coordinates.begin(), scenario.known_coordinates.end(), [&](const Coordinate& k) {
        if (k.size() != c.size()) return false;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (std::abs(k[i] - c[i]) > 1e-9) return false;
        return true;
    });
}

std::string format_coordinate(const Coordinate& c) {
    std::string out = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ", ";
        std::ostringstream s;
        s << c[i];
        out += s.str();
    }
    return out + ")";
}

} // namespace

std::vector<Violation> validate_functions(const Plan& plan, const SdkSpec& sdk) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        if (plan.defines(step.function)) continue;
        const SdkFunction* fn = sdk.find(step.function);
        if (fn == nullptr) {
            out.push_back(at_step(ViolationClass::unknown_function, plan, i, "'" + step.function + "' is not in the SDK registry"));
        } else if (step.args.size() != fn->params.size()) {
            out.push_back(at_step(ViolationClass::arity_mismatch, plan, i,
                                  fn->signature() + " called with " + std::to_string(step.args.size()) + " argument(s)"));
        }
    }
    return out;
}

GroundingResult validate_grounding(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario) {
    GroundingResult out;
    const ObjectMatcher matcher(scenario);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        const SdkFunction* fn = sdk.find(step.function);
        if (fn == nullptr || plan.defines(step.function)) continue;
        for (std::size_t a = 0; a < step.args.size(); ++a) {
            const SdkParam* param = bound_param(*fn, step, a);
            if (param == nullptr || param->type != ParamType::object_ref) continue;
            const auto text = reference_text(step.args[a]);
            const auto found = text.empty() ? std::vector<ObjectMatcher::Match>{} : matcher.matches(text);
            ArgumentGrounding g{i, a, !found.empty(), false};
            g.generic = g.grounded && std::all_of(found.begin(), found.end(), [](const auto& m) { return m.generic; });
            out.groundings.push_back(g);
            if (!g.grounded) {
                out.violations.push_back(at_step(ViolationClass::ungrounded_object, plan, i,
                                                 "argument '" + step.args[a].raw_text + "' names no object in the scene"));
            }
        }
    }
    return out;
}

std::vector<Violation> detect_spatial_literals(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        const SdkFunction* fn = plan.defines(step.function) ? nullptr : sdk.find(step.function);

        std::vector<Coordinate> coordinates;
        Coordinate loose;                   // top-level numeric arguments, in order
        std::optional<std::size_t> loose_index;
        for (std::size_t a = 0; a < step.args.size(); ++a) {
            const auto& arg = step.args[a];
            if (arg.numbers.size() >= 2) coordinates.push_back(arg.numbers);
            if (arg.numbers.size() == 1) {
                loose.push_back(arg.numbers.front());
                loose_index = a;
            }
        }
        if (loose.size() >= 2) {
            coordinates.push_back(loose);
        } else if (loose.size() == 1 && fn != nullptr) {
            const SdkParam* param = bound_param(*fn, step, *loose_index);
            if (param != nullptr && param->type == ParamType::position) coordinates.push_back(loose);
        }

        for (const auto& c : coordinates) {
            if (!known_coordinate(c, scenario)) {
                out.push_back(at_step(ViolationClass::spatial_literal, plan, i,
                                      "coordinate " + format_coordinate(c) + " is not a known scene position"));
            }
        }
    }
    return out;
}

std::optional<std::size_t> first_occurrence(const Plan& plan, const PlanElement& element, const ObjectMatcher& matcher) {
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        switch (element.kind) {
            case PlanElement::Kind::call:
                if (step.function == element.value) return i;
                break;
            case PlanElement::Kind::object:
                if (matcher.referenced_by(step).contains(element.value)) return i;
                break;
            case PlanElement::Kind::category:
                for (const auto& name : matcher.referenced_by(step)) {
                    const auto* item = matcher.scenario().find_item(name);
                    if (item != nullptr && item->category == element.value) return i;
                }
                break;
        }
    }
    return std::nullopt;
}

std::vector<Violation> check_precedence(const Plan& plan, const ScenarioSpec& scenario) {
    check_acyclic(scenario.precedence);
    std::vector<Violation> out;
    const ObjectMatcher matcher(scenario);
    for (const auto& c : scenario.precedence) {
        const auto before = first_occurrence(plan, c.before, matcher);
        const auto after = first_occurrence(plan, c.after, matcher);
        if (before && after && *after < *before) {
            out.push_back(at_step(ViolationClass::precedence_violation, plan, *after,
                                  c.after.str() + " is used before " + c.before.str()));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return *a.step_index < *b.step_index; });
    return out;
}

std::vector<Violation> check_mentions(const Plan& plan, const ScenarioSpec& scenario) {
    std::vector<Violation> out;
    const ObjectMatcher matcher(scenario);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto refs = matcher.referenced_by(plan.steps[i]);
        for (const auto& f : scenario.forbidden_objects) {
            if (refs.contains(f)) out.push_back(at_step(ViolationClass::forbidden_mention, plan, i, "mentions '" + f + "'"));
        }
        seen.insert(refs.begin(), refs.end());
    }
    for (const auto& r : scenario.required_objects) {
        if (!seen.contains(r)) {
            out.push_back(Violation{ViolationClass::missing_required_object, std::nullopt, std::nullopt, "never uses '" + r + "'"});
        }
    }
    return out;
}

std::vector<Violation> check_definitions(const Plan& plan) {
    std::vector<Violation> out;
    for (const auto& def : plan.definitions) {
        if (!def.invoked) {
            out.push_back(Violation{ViolationClass::definition_without_execution, std::nullopt, def.source_line,
                                    "'" + def.name + "' is defined but never executed"});
        }
    }
    return out;
}

ValidationReport validate(const Plan& plan, const SdkSpec& sdk, const ScenarioSpec& scenario, const RuleOptions& options) {
    ValidationReport report;
    auto keep = [&](std::vector<Violation> found) {
        for (auto& v : found)
            if (options.enabled(v.cls)) report.violations.push_back(std::move(v));
    };
    keep(validate_functions(plan, sdk));
    auto grounding = validate_grounding(plan, sdk, scenario);
    keep(std::move(grounding.violations));
    report.groundings = std::move(grounding.groundings);
    keep(detect_spatial_literals(plan, sdk, scenario));
    keep(check_precedence(plan, scenario));
    keep(check_mentions(plan, scenario));
    keep(check_definitions(plan));
    return report;
}

} // namespace roleplan
