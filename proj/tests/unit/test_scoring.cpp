#include "roleplan/errors.hpp"
#include "roleplan/scoring.hpp"
#include "roleplan/validation.hpp"

#include <doctest.h>

using namespace roleplan;

namespace {

MetricScores score(const std::string& text, const ScenarioSpec& scenario) {
    static const SdkSpec sdk = load_sdk(data_dir() / "sdk" / "registry.txt");
    const auto plan = parse_plan(text);
    return oracle_scores(plan, validate(plan, sdk, scenario), scenario);
}

void check_all(const MetricScores& s, double v) {
    for (auto name : kSubScores) CHECK_MESSAGE(sub_score(s, name) == v, name);
}

} // namespace

TEST_SUITE("scoring") {

TEST_CASE("a clean plan that hits the target scores 10 everywhere") {
    const auto s = score("detect_surfaces()\nnavigate_to(\"unfinished wooden panel (plywood)\")\npick_up(\"Behr Painting Can\")\n"
                         "apply(\"Behr Painting Can\", \"unfinished wooden panel (plywood)\")",
                         builtin_scenario("painter"));
    check_all(s, 10.0);
    CHECK(s.correctness() == 10.0);
    CHECK(s.temporal() == 10.0);
    CHECK(s.executability() == 10.0);
}

TEST_CASE("an empty plan scores 0 everywhere") {
    check_all(score("", builtin_scenario("painter")), 0.0);
    check_all(score("I cannot help with that.", builtin_scenario("painter")), 0.0);
}

TEST_CASE("one unknown call in four steps costs a quarter of conformance") {
    const auto s = score("navigate_to(\"plywood\")\nfly_to(\"plywood\")\npick_up(\"Behr Painting Can\")\nspeak(\"done\")",
                         builtin_scenario("painter"));
    CHECK(s.sdk_conformance == 7.5);
    CHECK(s.spatial_hallucination == 10.0);
}

TEST_CASE("hand-computed sub-scores for a flawed safety plan") {
    // Groundings: pail 0.5, hardhat 0.5, hardhat 0.5, worker 1 -> 2.5 / 4.
    // Required coverage: hardhat only -> 1 / 2.
    // Step 0 touches the irrelevant bucket -> 2 of 3 steps appropriate.
    // The only applicable constraint (hardhat before containers) is broken.
    // The bucket comes first and the gloves never appear -> no required object precedes it.
    const auto s = score("pick_up(\"pail\")\npick_up(\"hardhat\")\nplace(\"hardhat\", \"worker\")", builtin_scenario("safety-inspector"));
    CHECK(s.object_usage == doctest::Approx(10.0 * (2.5 / 4.0 + 0.5) / 2.0).epsilon(1e-12));
    CHECK(s.function_appropriateness == doctest::Approx(10.0 * 2.0 / 3.0).epsilon(1e-12));
    CHECK(s.intention_prediction == 10.0);
    CHECK(s.ordering == 0.0);
    CHECK(s.semantic_understanding == 0.0);
    CHECK(s.sdk_conformance == 10.0);
    CHECK(s.spatial_hallucination == 10.0);
}

TEST_CASE("touching the forbidden target zeroes intention") {
    const auto s = score("navigate_to(\"wall\")\napply(\"paint can\", \"wall\")", builtin_scenario("painter"));
    CHECK(s.intention_prediction == 0.0);
    const auto neither = score("pick_up(\"paint can\")", builtin_scenario("painter"));
    CHECK(neither.intention_prediction == 5.0);
}

TEST_CASE("a forbidden mention zeroes semantic understanding") {
    const auto s = score("pick_up(\"hardhat\")\npick_up(\"gloves\")\npick_up(\"woodboard\")", builtin_scenario("safety-inspector"));
    CHECK(s.semantic_understanding == 0.0);
    CHECK(s.function_appropriateness == doctest::Approx(10.0 * 2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("spatial literals reduce the spatial sub-score per step") {
    const auto s = score("move_to(3, 4)\nmove_to(0, 0)\nmove_to(5, 5)\nspeak(\"ok\")", builtin_scenario("painter"));
    CHECK(s.spatial_hallucination == 5.0);
}

TEST_CASE("metrics are unweighted means of their sub-scores") {
    MetricScores s;
    s.object_usage = 3;
    s.intention_prediction = 6;
    s.function_appropriateness = 9;
    s.ordering = 4;
    s.semantic_understanding = 8;
    s.spatial_hallucination = 1;
    s.sdk_conformance = 2;
    CHECK(s.metric("correctness") == 6.0);
    CHECK(s.metric("temporal") == 6.0);
    CHECK(s.metric("executability") == 1.5);
    CHECK(sub_scores_of("temporal").size() == 2);
}

TEST_CASE("scores round-trip through JSON with their source") {
    MetricScores s;
    s.source = ScoreSource::judge;
    s.ordering = 7;
    s.sdk_conformance = 2.5;
    const auto back = metric_scores_from_json(to_json(s));
    CHECK(back == s);
    CHECK(to_json(s)["source"] == "judge");
    CHECK_THROWS_AS(parse_score_source("crowd"), SchemaError);
}

}
