#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"
#include "roleplan/judge.hpp"
#include "roleplan/scenario.hpp"

#include "../support/test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace roleplan;

namespace {

const std::string kSeven =
    "object_usage: 8\nintention_prediction: 7\nfunction_appropriateness: 9\nordering: 6\n"
    "semantic_understanding: 5\nspatial_hallucination: 10\nsdk_conformance: 4\n";

ModelSpec judge_model() { return {"gpt-4o", "gpt", Modality::text, Usd::parse("2.50"), std::nullopt, 1024}; }
std::vector<ModelSpec> pipeline() {
    return {{"minicpm-v-2.6", "minicpm", Modality::vision, Usd::parse("0.07"), std::nullopt, 1024},
            {"llama3-8b", "llama", Modality::text, Usd::parse("0.05"), std::nullopt, 1024}};
}

JudgeConfig config(std::uint64_t seed = 7) {
    JudgeConfig cfg;
    cfg.model = judge_model();
    cfg.rubric = read_text_file(data_dir() / "rubric" / "v1" / "judge.txt");
    cfg.shuffle_seed = seed;
    return cfg;
}

std::vector<JudgeItem> batch(std::size_t n) {
    const std::vector<std::string> designs = {"A_single", "B_two", "C_three", "D_four"};
    std::vector<JudgeItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        JudgeItem item;
        item.item_id = "item" + std::to_string(i);
        item.role = "Painter Tradesperson";
        item.design = designs[i % 4];
        item.model_ids = {"minicpm-v-2.6", "llama3-8b"};
        item.model_families = {"minicpm", "llama"};
        item.plan_text = "# " + item.design + " plan by a four-agent crew (MiniCPM-V-2.6 and Llama3-8B), design B\n"
                         "pick_up(\"paint can\")  # single agent step " + std::to_string(i) + "\n";
        items.push_back(item);
    }
    return items;
}

} // namespace

TEST_SUITE("judge") {

TEST_CASE("seven sub-score lines parse into judge scores") {
    const auto s = parse_judge_response(kSeven);
    CHECK(s.source == ScoreSource::judge);
    CHECK(s.object_usage == 8);
    CHECK(s.intention_prediction == 7);
    CHECK(s.function_appropriateness == 9);
    CHECK(s.ordering == 6);
    CHECK(s.semantic_understanding == 5);
    CHECK(s.spatial_hallucination == 10);
    CHECK(s.sdk_conformance == 4);
}

TEST_CASE("a metric score fills its sub-scores and sub-scores override it") {
    const auto s = parse_judge_response("correctness: 8, temporal: 6, executability: 9, ordering: 3");
    CHECK(s.object_usage == 8);
    CHECK(s.intention_prediction == 8);
    CHECK(s.function_appropriateness == 8);
    CHECK(s.correctness() == 8);
    CHECK(s.ordering == 3);
    CHECK(s.semantic_understanding == 6);
    CHECK(s.executability() == 9);
}

TEST_CASE("keys are matched loosely and surrounding prose is ignored") {
    const auto s = parse_judge_response("Here you go.\nObject Usage = 2\nIntention-Prediction: 3\ntemporal: 4\nexecutability: 5\nfunction appropriateness: 6\n");
    CHECK(s.object_usage == 2);
    CHECK(s.intention_prediction == 3);
    CHECK(s.function_appropriateness == 6);
}

TEST_CASE("incomplete, fractional or out-of-range verdicts are parse errors") {
    CHECK_THROWS_AS(parse_judge_response("correctness: 8"), JudgeParseError);
    CHECK_THROWS_AS(parse_judge_response("I think it is fine."), JudgeParseError);
    CHECK_THROWS_AS(parse_judge_response("correctness: 8.5, temporal: 6, executability: 9"), JudgeParseError);
    CHECK_THROWS_AS(parse_judge_response("correctness: 11, temporal: 6, executability: 9"), JudgeParseError);
}

TEST_CASE("design names, architecture words and model ids are redacted") {
    const auto items = batch(4);
    for (const auto& item : items) {
        const auto text = anonymize_plan(item.plan_text, item);
        std::string lower = text;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        for (const char* banned : {"a_single", "b_two", "c_three", "d_four", "four-agent", "single agent", "design b", "minicpm", "llama"})
            CHECK_MESSAGE(lower.find(banned) == std::string::npos, banned << " in " << text);
        CHECK(text.find("pick_up(\"paint can\")") != std::string::npos);
    }
}

TEST_CASE("the rubric needs a plan placeholder") {
    CHECK_THROWS_AS(render_judge_prompt("Score {role}.", "Painter", "x"), PromptPackError);
    CHECK(render_judge_prompt("{role}: {plan} / {plan}", "Painter", "p()") == "Painter: p() / p()");
}

TEST_CASE("a judge from a pipeline model family is rejected") {
    auto same = judge_model();
    same.family = "LLaMA";
    CHECK_THROWS_AS(check_judge_family(same, pipeline()), JudgeFamilyConflict);
    CHECK_NOTHROW(check_judge_family(judge_model(), pipeline()));

    support::RecordingBackend backend([](const auto&, const auto&) { return support::text_reply(kSeven); });
    auto cfg = config();
    cfg.model = same;
    CHECK_THROWS_AS(judge_scores(batch(2), cfg, pipeline(), backend), JudgeFamilyConflict);
    CHECK(backend.requests().empty());
}

TEST_CASE("the shuffle is a seeded permutation") {
    const auto a = shuffled_order(8, 7);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> identity(8);
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(sorted == identity);
    CHECK(shuffled_order(8, 7) == a);
    CHECK(shuffled_order(8, 8) != a);
    CHECK(shuffled_order(0, 7).empty());
    CHECK(shuffled_order(1, 7) == std::vector<std::size_t>{0});
}

TEST_CASE("items reach the judge in shuffled order and come back in input order") {
    support::RecordingBackend backend([](const auto&, const auto&) { return support::text_reply(kSeven, 300, 20); });
    const auto items = batch(8);
    const auto out = judge_scores(items, config(7), pipeline(), backend);
    const auto order = shuffled_order(8, 7);

    const auto requests = backend.requests();
    REQUIRE(requests.size() == 8);
    for (std::size_t pos = 0; pos < 8; ++pos) {
        CHECK(requests[pos].user_message.find("single agent step " + std::to_string(order[pos])) == std::string::npos);
        CHECK(requests[pos].user_message.find("step " + std::to_string(order[pos])) != std::string::npos);
        CHECK(requests[pos].route == "judge");
    }
    REQUIRE(out.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(out[i].item_id == items[i].item_id);
        CHECK(order[out[i].submission_index] == i);
        REQUIRE(out[i].scores.has_value());
        CHECK(out[i].scores->object_usage == 8);
        CHECK(out[i].tokens_in == 300);
        CHECK_FALSE(out[i].judge_failed);
    }
}

TEST_CASE("unparseable output is retried once, then the item is marked failed") {
    int calls = 0;
    support::RecordingBackend flaky([&](const auto&, const auto&) { return support::text_reply(++calls == 1 ? "no idea" : kSeven); });
    const auto ok = judge_scores(batch(1), config(), pipeline(), flaky);
    CHECK(calls == 2);
    CHECK(ok[0].scores.has_value());

    support::RecordingBackend hopeless([](const auto&, const auto&) { return support::text_reply("no idea"); });
    const auto failed = judge_scores(batch(2), config(), pipeline(), hopeless);
    CHECK(hopeless.requests().size() == 4);
    for (const auto& o : failed) {
        CHECK(o.judge_failed);
        CHECK_FALSE(o.scores.has_value());
    }
}

TEST_CASE("replaying a judge transcript yields the same scores") {
    int n = 0;
    support::RecordingBackend live([&](const auto&, const auto&) {
        const int k = n++ % 10;
        return support::text_reply("correctness: " + std::to_string(k) + ", temporal: 5, executability: " + std::to_string(10 - k));
    });
    const auto items = batch(6);
    const auto first = judge_scores(items, config(3), pipeline(), live);

    std::vector<TranscriptRecord> records;
    const auto reqs = live.requests();
    for (std::size_t pos = 0; pos < reqs.size(); ++pos) {
        TranscriptRecord r;
        r.digest = request_digest(reqs[pos]);
        const auto& outcome = *std::find_if(first.begin(), first.end(), [&](const auto& o) { return o.submission_index == pos; });
        r.response = support::text_reply(outcome.raw_response);
        records.push_back(r);
    }
    ReplayBackend replay(records);
    const auto second = judge_scores(items, config(3), pipeline(), replay);
    for (std::size_t i = 0; i < items.size(); ++i) CHECK(second[i].scores == first[i].scores);
}

}
