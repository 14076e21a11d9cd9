#pragma once

#include "roleplan/plan.hpp"
#include "roleplan/scenario.hpp"
#include "roleplan/validation.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>

namespace roleplan {

enum class ScoreSource { oracle, judge };

std::string_view to_string(ScoreSource s);
ScoreSource parse_score_source(std::string_view text);

// All scores are on a 0..10 scale. A metric is the unweighted mean of its sub-scores.
struct MetricScores {
    ScoreSource source = ScoreSource::oracle;

    // correctness
    double object_usage = 0;
    double intention_prediction = 0;
    double function_appropriateness = 0;
    // temporal understanding
    double ordering = 0;
    double semantic_understanding = 0;
    // executability
    double spatial_hallucination = 0;
    double sdk_conformance = 0;

    double correctness() const { return (object_usage + intention_prediction + function_appropriateness) / 3.0; }
    double temporal() const { return (ordering + semantic_understanding) / 2.0; }
    double executability() const { return (spatial_hallucination + sdk_conformance) / 2.0; }
    double metric(std::string_view name) const;

    friend bool operator==(const MetricScores&, const MetricScores&) = default;
};

inline constexpr std::array<std::string_view, 3> kScoreMetrics = {"correctness", "temporal", "executability"};

inline constexpr std::array<std::string_view, 7> kSubScores = {
    "object_usage", "intention_prediction", "function_appropriateness", "ordering",
    "semantic_understanding", "spatial_hallucination", "sdk_conformance",
};

// Sub-scores belonging to a metric name from kScoreMetrics.
std::vector<std::string_view> sub_scores_of(std::string_view metric);

double& sub_score(MetricScores& s, std::string_view name);
double sub_score(const MetricScores& s, std::string_view name);

nlohmann::json to_json(const MetricScores& s);
MetricScores metric_scores_from_json(const nlohmann::json& j);

// Deterministic rubric computed from the plan, its validation report and the scenario.
// An empty plan scores 0 everywhere.
MetricScores oracle_scores(const Plan& plan, const ValidationReport& report, const ScenarioSpec& scenario);

} // namespace roleplan
