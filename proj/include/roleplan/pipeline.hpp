#pragma once

#include "roleplan/cost.hpp"
#include "roleplan/design.hpp"
#include "roleplan/model_backend.hpp"
#include "roleplan/prompt_pack.hpp"
#include "roleplan/scenario.hpp"
#include "roleplan/sdk.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roleplan {

// Cognitive-architecture block an agent stands in for.
enum class SoarBlock { input_link, working_memory, output_link, preference_system };

std::string_view to_string(SoarBlock b);

struct AgentDef {
    std::string agent_role;
    // Templates; {role} is the only placeholder.
    std::string goal;
    std::string backstory;
    ModelSpec model;
    // Agents in the smaller designs cover several blocks at once.
    std::vector<SoarBlock> soar_blocks;
};

struct TaskDef {
    std::string id;
    Design design = Design::A_single;
    // Template; {role} is the only placeholder.
    std::string description;
    std::string expected_output;
    AgentDef agent;
    // Earlier task ids whose outputs are injected, in this order.
    std::vector<std::string> context;
    // SDK documentation for tasks that write code against the registry; empty otherwise.
    std::string sdk_reference;
    bool receives_image = false;
};

struct PipelineTopology {
    Design design = Design::A_single;
    std::vector<TaskDef> tasks;
    std::string entry_image_task;
    std::string prompt_pack_version;

    // Throws TopologyError for an unknown id.
    const TaskDef& task(std::string_view id) const;
    // Distinct models in task order.
    std::vector<ModelSpec> models() const;
    // Model id behind each task, in task order.
    std::vector<std::string> agent_models() const;
};

// Throws TopologyError unless every context id names a strictly earlier task and exactly
// one task (the entry task) receives the image on a vision model.
void validate_topology(const PipelineTopology& topology);

struct RoleAssignment {
    std::string role;
    ScenarioSpec scenario;

    static RoleAssignment for_scenario(const ScenarioSpec& scenario) { return {scenario.role, scenario}; }
};

// Builds the fixed agent layout of a design with texts from the prompt pack.
// Throws InvalidModality when vlm is not a vision model or llm is not a text model.
PipelineTopology build_topology(Design design, const ModelSpec& vlm, const ModelSpec& llm, const PromptPack& pack,
                                const SdkSpec& sdk);

// Throws MissingContext when an upstream output is absent.
CompletionRequest render_prompt(const TaskDef& task, const RoleAssignment& assignment,
                                const std::map<std::string, std::string>& upstream);

// Backend per model id. Shared across concurrent runs.
class BackendSet {
public:
    void bind(const std::string& model_id, std::shared_ptr<Backend> backend);
    // Throws ConfigError when no backend is bound.
    Backend& for_model(const ModelSpec& model) const;
    bool deterministic_for(const std::vector<ModelSpec>& models) const;

private:
    std::map<std::string, std::shared_ptr<Backend>> by_model_;
};

struct PipelineRunResult {
    std::string raw_plan_text;
    std::map<std::string, std::string> per_task_outputs;
    std::vector<TranscriptRecord> transcript;
    double wall_time_s = 0.0;
    TokensByModel total_tokens_by_model;
    bool tokens_estimated = false;
};

struct ExecuteOptions {
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
};

// Runs the tasks in order. Backend and input failures are rethrown as TaskFailure naming the task.
// Wall time is the sum of reported latencies when every backend is deterministic (so replayed
// runs reproduce it), otherwise a steady clock around the whole pipeline.
PipelineRunResult execute_pipeline(const PipelineTopology& topology, const RoleAssignment& assignment,
                                   const BackendSet& backends, const ExecuteOptions& options = {});

// Short class name for a pipeline error ("wire_error", "empty_response", ...).
std::string failure_class_of(const std::exception& e);

} // namespace roleplan
