#include "roleplan/scoring.hpp"

#include "roleplan/errors.hpp"
#include "roleplan/matcher.hpp"

#include <algorithm>

namespace roleplan {

std::string_view to_string(ScoreSource s) {
    return s == ScoreSource::oracle ? "oracle" : "judge";
}

ScoreSource parse_score_source(std::string_view text) {
    if (text == "oracle") return ScoreSource::oracle;
    if (text == "judge") return ScoreSource::judge;
    throw SchemaError("source", "unknown score source '" + std::string(text) + "'");
}

std::vector<std::string_view> sub_scores_of(std::string_view metric) {
    if (metric == "correctness") return {"object_usage", "intention_prediction", "function_appropriateness"};
    if (metric == "temporal") return {"ordering", "semantic_understanding"};
    if (metric == "executability") return {"spatial_hallucination", "sdk_conformance"};
    return {};
}

double& sub_score(MetricScores& s, std::string_view name) {
    if (name == "object_usage") return s.object_usage;
    if (name == "intention_prediction") return s.intention_prediction;
    if (name == "function_appropriateness") return s.function_appropriateness;
    if (name == "ordering") return s.ordering;
    if (name == "semantic_understanding") return s.semantic_understanding;
    if (name == "spatial_hallucination") return s.spatial_hallucination;
    if (name == "sdk_conformance") return s.sdk_conformance;
    throw SchemaError(std::string(name), "unknown sub-score");
}

double sub_score(const MetricScores& s, std::string_view name) {
    return sub_score(const_cast<MetricScores&>(s), name);
}

double MetricScores::metric(std::string_view name) const {
    if (name == "correctness") return correctness();
    if (name == "temporal") return temporal();
    if (name == "executability") return executability();
    throw SchemaError(std::string(name), "unknown metric");
}

nlohmann::json to_json(const MetricScores& s) {
    nlohmann::json sub = nlohmann::json::object();
    for (auto name : kSubScores) sub[std::string(name)] = sub_score(s, name);
    return {
        {"source", to_string(s.source)},
        {"correctness", s.correctness()},
        {"temporal", s.temporal()},
        {"executability", s.executability()},
        {"sub_scores", sub},
    };
}

MetricScores metric_scores_from_json(const nlohmann::json& j) {
    MetricScores s;
    s.source = parse_score_source(j.at("source").get<std::string>());
    for (auto name : kSubScores) sub_score(s, name) = j.at("sub_scores").at(std::string(name)).get<double>();
    return s;
}

MetricScores oracle_scores(const Plan& plan, const ValidationReport& report, const ScenarioSpec& scenario) {
    MetricScores s;
    s.source = ScoreSource::oracle;
    if (plan.steps.empty()) return s;

    const ObjectMatcher matcher(scenario);
    const double steps = static_cast<double>(plan.steps.size());
    auto first_object = [&](const std::string& name) {
        return first_occurrence(plan, PlanElement{PlanElement::Kind::object, name}, matcher);
    };

    // executability
    const auto sdk_errors = report.count(ViolationClass::unknown_function) + report.count(ViolationClass::arity_mismatch);
    s.sdk_conformance = std::clamp(10.0 * (1.0 - static_cast<double>(sdk_errors) / steps), 0.0, 10.0);
    s.spatial_hallucination =
        std::clamp(10.0 * (1.0 - static_cast<double>(report.count(ViolationClass::spatial_literal)) / steps), 0.0, 10.0);

    // correctness
    double grounding = 0;
    if (!report.groundings.empty()) {
        double credit = 0;
        for (const auto& g : report.groundings)
            if (g.grounded) credit += g.generic ? 0.5 : 1.0;
        grounding = credit / static_cast<double>(report.groundings.size());
    }
    double coverage = 1;
    if (!scenario.required_objects.empty()) {
        const auto hit = std::count_if(scenario.required_objects.begin(), scenario.required_objects.end(),
                                       [&](const std::string& r) { return first_object(r).has_value(); });
        coverage = static_cast<double>(hit) / static_cast<double>(scenario.required_objects.size());
    }
    s.object_usage = 10.0 * (grounding + coverage) / 2.0;

    std::set<std::size_t> misdirected_steps;
    for (const auto& v : report.violations)
        if (v.cls == ViolationClass::unknown_function && v.step_index) misdirected_steps.insert(*v.step_index);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto refs = matcher.referenced_by(plan.steps[i]);
        auto touches = [&](const std::vector<std::string>& names) {
            return std::any_of(names.begin(), names.end(), [&](const auto& n) { return refs.contains(n); });
        };
        if (touches(scenario.forbidden_objects) || touches(scenario.irrelevant_objects)) misdirected_steps.insert(i);
    }
    s.function_appropriateness = 10.0 * (steps - static_cast<double>(misdirected_steps.size())) / steps;

    if (scenario.forbidden_target && first_object(*scenario.forbidden_target)) {
        s.intention_prediction = 0;
    } else if (first_object(scenario.intended_target)) {
        s.intention_prediction = 10;
    } else {
        s.intention_prediction = 5;
    }

    // temporal understanding
    std::size_t applicable = 0;
    std::size_t satisfied = 0;
    for (const auto& c : scenario.precedence) {
        const auto before = first_occurrence(plan, c.before, matcher);
        const auto after = first_occurrence(plan, c.after, matcher);
        if (!before || !after) continue;
        ++applicable;
        if (*after >= *before) ++satisfied;
    }
    s.ordering = applicable == 0 ? 10.0 : 10.0 * static_cast<double>(satisfied) / static_cast<double>(applicable);

    double required_first = 1;
    if (!scenario.required_objects.empty()) {
        std::optional<std::size_t> first_irrelevant;
        for (const auto& name : scenario.irrelevant_objects) {
            const auto at = first_object(name);
            if (at && (!first_irrelevant || *at < *first_irrelevant)) first_irrelevant = at;
        }
        // A required object sharing a step with the first irrelevant one still counts as first.
        const auto early = std::count_if(scenario.required_objects.begin(), scenario.required_objects.end(), [&](const auto& r) {
            const auto at = first_object(r);
            return at && (!first_irrelevant || *at <= *first_irrelevant);
        });
        required_first = static_cast<double>(early) / static_cast<double>(scenario.required_objects.size());
    }
    const bool forbidden = report.count(ViolationClass::forbidden_mention) > 0;
    s.semantic_understanding = (forbidden ? 0.0 : 10.0) * required_first;
    return s;
}

} // namespace roleplan
