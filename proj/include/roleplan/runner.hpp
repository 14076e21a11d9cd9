#pragma once

#include "roleplan/cost.hpp"
#include "roleplan/design.hpp"
#include "roleplan/model_backend.hpp"
#include "roleplan/pipeline.hpp"
#include "roleplan/prompt_pack.hpp"
#include "roleplan/records.hpp"
#include "roleplan/scenario.hpp"
#include "roleplan/sdk.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace roleplan {

struct BackendBinding {
    // "mock", "http" or "replay"
    std::string type;
    std::filesystem::path script;     // mock
    HttpBackendOptions http;          // http
    std::filesystem::path transcript; // replay
};

struct ModelBinding {
    ModelSpec spec; // price filled from the price table
    std::string backend;
};

struct JudgeSettings {
    ModelBinding model;
    std::filesystem::path rubric;
    std::uint64_t seed = 0;
    bool anonymize = true;
};

struct ExperimentConfig {
    std::vector<Design> designs{kAllDesigns.begin(), kAllDesigns.end()};
    // Builtin ids or scenario file paths.
    std::vector<std::string> scenarios;
    int repetitions = 20;
    std::uint64_t seed = 0;
    int parallelism = 1;
    double temperature = 0.0;
    std::filesystem::path output_dir = "runs/latest";
    std::filesystem::path prices;
    std::filesystem::path prompt_pack;
    std::filesystem::path sdk;
    ModelBinding vision;
    ModelBinding text;
    std::map<std::string, BackendBinding> backends;
    std::optional<JudgeSettings> judge;

    // Mock backends over the shipped data and all builtin scenarios; no judge.
    static ExperimentConfig defaults();
    // Keys absent from the file keep their default values. Relative paths resolve
    // against base_dir. Throws ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static ExperimentConfig parse_yaml(std::string_view text, const std::filesystem::path& base_dir);
    static ExperimentConfig load(const std::filesystem::path& path);

    // Absolute paths; the form stored as config.json in a run directory.
    nlohmann::json to_json() const;

    // Throws ConfigError unless every invariant holds and every path resolves.
    void validate() const;

    // Stable digest of everything that affects a single run's output (not repetitions,
    // parallelism or the output directory).
    std::string digest() const;
};

// Everything a run needs, loaded once and shared read-only by the workers.
struct Experiment {
    ExperimentConfig config;
    PriceTable prices;
    PromptPack pack;
    SdkSpec sdk;
    std::vector<ScenarioSpec> scenarios;
    std::map<Design, PipelineTopology> topologies;
    BackendSet backends;

    // Throws ConfigError (or the underlying schema error) on bad inputs.
    static Experiment prepare(const ExperimentConfig& config);
    const ScenarioSpec& scenario(std::string_view id) const;
    std::vector<ModelSpec> pipeline_models() const;
};

std::shared_ptr<Backend> make_backend(const BackendBinding& binding);

std::string run_key(Design design, std::string_view scenario_id, int repetition, std::string_view config_digest);
std::string record_id(Design design, std::string_view scenario_id, int repetition, int repetitions);

// Parses the plan text of a completed record, validates it and attaches oracle scores.
void attach_oracle_scores(RunRecord& record, const ScenarioSpec& scenario, const SdkSpec& sdk);

struct RunSummary {
    std::filesystem::path dir;
    std::size_t executed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::vector<std::string> warnings;
};

// Executes the design x scenario x repetition matrix, skipping runs already completed in the
// output directory, and writes records.jsonl, transcripts/, meta.json, config.json and the report.
RunSummary cmd_run(const ExperimentConfig& config, std::ostream& log);

struct EvaluateOptions {
    bool oracle = false;
    bool judge = false;
    // Overrides the judge settings stored with the run.
    std::optional<JudgeSettings> judge_override;
    std::optional<std::map<std::string, BackendBinding>> extra_backends;
};

// Attaches scores of the selected sources to every completed record. Throws ConfigError
// when judging is requested without judge settings.
void cmd_evaluate(const std::filesystem::path& dir, const EvaluateOptions& options, std::ostream& log);

// Regenerates the report files; returns warnings.
std::vector<std::string> cmd_report(const std::filesystem::path& dir, std::ostream& log);

// Prints the agent-by-agent exchange of one record. With verify, re-executes the run against
// its transcript and throws Error unless plan text, tokens and oracle scores match.
void cmd_replay(const std::filesystem::path& dir, std::string_view record_id, bool verify, std::ostream& out);

ExperimentConfig load_run_config(const std::filesystem::path& dir);

} // namespace roleplan
