#pragma once

#include "roleplan/cost.hpp"
#include "roleplan/money.hpp"
#include "roleplan/scoring.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace roleplan {

enum class RunStatus { completed, failed };

std::string_view to_string(RunStatus s);
RunStatus parse_run_status(std::string_view text);

struct RunRecord {
    std::string record_id;
    // Resume key: digest of design, scenario, repetition and the configuration digest.
    std::string run_key;
    std::string scenario_id;
    std::string role;
    std::string design;
    int repetition = 0;
    std::uint64_t seed = 0;
    double temperature = 0.0;
    RunStatus status = RunStatus::completed;
    std::optional<std::string> failure_class;
    std::optional<std::string> failed_task;
    std::optional<std::string> failure_message;

    std::string plan_text;
    // Model behind each agent, in task order.
    std::vector<std::string> agent_models;
    double wall_time_s = 0.0;
    TokensByModel tokens;
    bool tokens_estimated = false;
    Usd cost_usd;
    std::string transcript_ref;

    std::optional<MetricScores> oracle;
    std::optional<MetricScores> judge;
    bool judge_failed = false;
    std::size_t residue_lines = 0;

    const std::optional<MetricScores>& scores(ScoreSource source) const { return source == ScoreSource::oracle ? oracle : judge; }
};

// Field order is fixed so that record files compare byte for byte.
nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

std::vector<RunRecord> read_records(const std::filesystem::path& path);
// Sorted by record id, one JSON object per line.
void write_records(const std::filesystem::path& path, std::vector<RunRecord> records);

} // namespace roleplan
