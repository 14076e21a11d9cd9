#pragma once

#include "roleplan/model_backend.hpp"
#include "roleplan/scoring.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

struct JudgeConfig {
    ModelSpec model;
    // Template with {role} and {plan} placeholders.
    std::string rubric;
    std::uint64_t shuffle_seed = 0;
    bool anonymize = true;
    double temperature = 0.0;
};

// One plan awaiting a verdict. design and model identifiers are used only for redaction.
struct JudgeItem {
    std::string item_id;
    std::string role;
    std::string plan_text;
    std::string design;
    std::vector<std::string> model_ids;
    std::vector<std::string> model_families;
};

struct JudgeOutcome {
    std::string item_id;
    // Position in which the item was submitted to the judge.
    std::size_t submission_index = 0;
    std::optional<MetricScores> scores;
    bool judge_failed = false;
    std::string raw_response;
    std::string prompt;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
};

// Throws JudgeFamilyConflict when the judge shares a family with any pipeline model.
void check_judge_family(const ModelSpec& judge, const std::vector<ModelSpec>& pipeline_models);

// Seeded Fisher-Yates permutation of 0..n-1; identical on every platform.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

// Replaces design names, architecture descriptions and model identifiers with neutral tokens.
std::string anonymize_plan(std::string_view text, const JudgeItem& item);

// Throws PromptPackError when the template lacks {plan}.
std::string render_judge_prompt(std::string_view rubric, std::string_view role, std::string_view plan);

// Reads "key: integer" pairs (0..10). A metric key such as "correctness: 8" sets all of its
// sub-scores; a sub-score key overrides it. Throws JudgeParseError unless every sub-score is set.
MetricScores parse_judge_response(std::string_view text);

// Submits every item in the seed-determined order. Unparseable output is re-requested once,
// then the item is marked judge_failed. Outcomes are returned in input order.
std::vector<JudgeOutcome> judge_scores(const std::vector<JudgeItem>& items, const JudgeConfig& cfg,
                                       const std::vector<ModelSpec>& pipeline_models, Backend& backend);

} // namespace roleplan
