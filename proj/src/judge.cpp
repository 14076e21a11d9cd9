#include "roleplan/judge.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <random>
#include <regex>

namespace roleplan {

namespace {

constexpr std::string_view kRedacted = "[redacted]";
constexpr std::string_view kJudgeSystemPrompt =
    "You are an impartial evaluator of robot task plans. Score only what the plan itself shows.";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string regex_escape(std::string_view s) {
    static const std::string special = R"(\^$.|?*+()[]{})";
    std::string out;
    for (char c : s) {
        if (special.find(c) != std::string::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string redact(std::string text, const std::string& pattern) {
    const std::regex re(pattern, std::regex::icase | std::regex::ECMAScript);
    return std::regex_replace(text, re, std::string(kRedacted));
}

std::string normalize_key(std::string_view key) {
    std::string out;
    for (char c : key) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
        else if (!out.empty() && out.back() != '_') out.push_back('_');
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

} // namespace

void check_judge_family(const ModelSpec& judge, const std::vector<ModelSpec>& pipeline_models) {
    const auto family = lower(judge.family);
    for (const auto& m : pipeline_models) {
        if (lower(m.family) == family) {
            throw JudgeFamilyConflict("judge model '" + judge.id + "' shares family '" + judge.family +
                                      "' with pipeline model '" + m.id + "'");
        }
    }
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = rng();
        while (r >= limit) r = rng();
        std::swap(order[i - 1], order[static_cast<std::size_t>(r % bound)]);
    }
    return order;
}

std::string anonymize_plan(std::string_view text, const JudgeItem& item) {
    std::string out(text);
    out = redact(out, R"(\b[abcd]_(single|two|three|four)\b)");
    out = redact(out, R"(\b(single|one|two|three|four|multi)[- ]?agents?\b)");
    out = redact(out, R"(\bdesign [abcd]\b)");
    if (!item.design.empty()) out = redact(out, regex_escape(item.design));
    for (const auto& id : item.model_ids)
        if (!id.empty()) out = redact(out, regex_escape(id));
    for (const auto& family : item.model_families)
        if (!family.empty()) out = redact(out, R"(\b)" + regex_escape(family) + R"(\w*)");
    return out;
}

std::string render_judge_prompt(std::string_view rubric, std::string_view role, std::string_view plan) {
    std::string out(rubric);
    if (out.find("{plan}") == std::string::npos) throw PromptPackError("judge rubric has no {plan} placeholder");
    auto replace_all = [&](std::string_view key, std::string_view value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
            out.replace(pos, key.size(), value);
    };
    replace_all("{role}", role);
    replace_all("{plan}", plan);
    return out;
}

MetricScores parse_judge_response(std::string_view text) {
    static const std::regex pair_re(R"(([A-Za-z][A-Za-z _-]*?)\s*[:=]\s*(-?\d+(?:\.\d+)?))");
    std::map<std::string, double> metric_values;
    std::map<std::string, double> sub_values;

    const std::string body(text);
    for (auto it = std::sregex_iterator(body.begin(), body.end(), pair_re); it != std::sregex_iterator(); ++it) {
        const auto key = normalize_key((*it)[1].str());
        const auto raw = (*it)[2].str();
        const bool is_metric = !sub_scores_of(key).empty();
        const bool is_sub = std::find(kSubScores.begin(), kSubScores.end(), key) != kSubScores.end();
        if (!is_metric && !is_sub) continue;
        if (raw.find('.') != std::string::npos) throw JudgeParseError("score for '" + key + "' is not an integer: " + raw);
        const int value = std::stoi(raw);
        if (value < 0 || value > 10) throw JudgeParseError("score for '" + key + "' outside 0..10: " + raw);
        (is_metric ? metric_values : sub_values)[key] = value;
    }

    MetricScores s;
    s.source = ScoreSource::judge;
    std::set<std::string_view> assigned;
    for (const auto& [metric, value] : metric_values) {
        for (auto sub : sub_scores_of(metric)) {
            sub_score(s, sub) = value;
            assigned.insert(sub);
        }
    }
    for (const auto& [key, value] : sub_values) {
        auto it = std::find(kSubScores.begin(), kSubScores.end(), key);
        sub_score(s, *it) = value;
        assigned.insert(*it);
    }
    if (assigned.size() != kSubScores.size()) {
        std::string missing;
        for (auto sub : kSubScores)
            if (!assigned.contains(sub)) missing += (missing.empty() ? "" : ", ") + std::string(sub);
        throw JudgeParseError("judge response lacks scores for: " + missing);
    }
    return s;
}

std::vector<JudgeOutcome> judge_scores(const std::vector<JudgeItem>& items, const JudgeConfig& cfg,
                                       const std::vector<ModelSpec>& pipeline_models, Backend& backend) {
    check_judge_family(cfg.model, pipeline_models);
    std::vector<JudgeOutcome> outcomes(items.size());
    const auto order = shuffled_order(items.size(), cfg.shuffle_seed);

    for (std::size_t position = 0; position < order.size(); ++position) {
        const auto& item = items[order[position]];
        auto& outcome = outcomes[order[position]];
        outcome.item_id = item.item_id;
        outcome.submission_index = position;

        const auto plan = cfg.anonymize ? anonymize_plan(item.plan_text, item) : item.plan_text;
        CompletionRequest req;
        req.system_prompt = std::string(kJudgeSystemPrompt);
        req.user_message = render_judge_prompt(cfg.rubric, item.role, plan);
        req.temperature = cfg.temperature;
        req.seed = static_cast<std::int64_t>(cfg.shuffle_seed);
        req.route = "judge";
        outcome.prompt = req.user_message;

        for (int attempt = 0; attempt < 2 && !outcome.scores; ++attempt) {
            try {
                const auto resp = complete(backend, cfg.model, req);
                outcome.raw_response = resp.text;
                outcome.tokens_in += resp.tokens_in;
                outcome.tokens_out += resp.tokens_out;
                outcome.scores = parse_judge_response(resp.text);
            } catch (const JudgeParseError&) {
            } catch (const EmptyResponse&) {
                break;
            }
        }
        outcome.judge_failed = !outcome.scores.has_value();
    }
    return outcomes;
}

} // namespace roleplan
