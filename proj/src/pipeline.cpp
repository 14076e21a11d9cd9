#include "roleplan/pipeline.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace roleplan {

std::string_view to_string(SoarBlock b) {
    switch (b) {
        case SoarBlock::input_link: return "input_link";
        case SoarBlock::working_memory: return "working_memory";
        case SoarBlock::output_link: return "output_link";
        case SoarBlock::preference_system: return "preference_system";
    }
    return "unknown";
}

const TaskDef& PipelineTopology::task(std::string_view id) const {
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const TaskDef& t) { return t.id == id; });
    if (it == tasks.end()) throw TopologyError("no task '" + std::string(id) + "' in design " + std::string(to_string(design)));
    return *it;
}

std::vector<ModelSpec> PipelineTopology::models() const {
    std::vector<ModelSpec> out;
    for (const auto& t : tasks) {
        if (std::none_of(out.begin(), out.end(), [&](const ModelSpec& m) { return m.id == t.agent.model.id; }))
            out.push_back(t.agent.model);
    }
    return out;
}

std::vector<std::string> PipelineTopology::agent_models() const {
    std::vector<std::string> out;
    for (const auto& t : tasks) out.push_back(t.agent.model.id);
    return out;
}

void validate_topology(const PipelineTopology& topology) {
    if (topology.tasks.empty()) throw TopologyError("topology has no tasks");
    std::set<std::string> earlier;
    std::size_t image_tasks = 0;
    for (const auto& t : topology.tasks) {
        if (earlier.contains(t.id)) throw TopologyError("duplicate task id '" + t.id + "'");
        for (const auto& c : t.context) {
            if (!earlier.contains(c)) {
                throw TopologyError("task '" + t.id + "' takes context from '" + c + "', which does not run before it");
            }
        }
        if (t.receives_image) {
            ++image_tasks;
            if (!t.agent.model.accepts_images()) throw TopologyError("task '" + t.id + "' receives the image on a text model");
            if (t.id != topology.entry_image_task) throw TopologyError("image task '" + t.id + "' is not the entry task");
        }
        earlier.insert(t.id);
    }
    if (image_tasks != 1) throw TopologyError("exactly one task must receive the scene image");
}

namespace {

struct Slot {
    std::string_view id;
    bool vision;
    std::vector<SoarBlock> blocks;
    bool writes_code;
};

std::vector<Slot> slots_for(Design design) {
    using B = SoarBlock;
    switch (design) {
        case Design::A_single:
            return {{"solo", true, {B::input_link, B::working_memory, B::output_link}, true}};
        case Design::B_two:
            return {{"observe_plan", true, {B::input_link, B::working_memory}, false}, {"actor", false, {B::output_link}, true}};
        case Design::C_three:
            return {{"observer", true, {B::input_link}, false},
                    {"planner", false, {B::working_memory}, false},
                    {"actor", false, {B::output_link}, true}};
        case Design::D_four:
            return {{"observer", true, {B::input_link}, false},
                    {"planner", false, {B::working_memory}, false},
                    {"actor", false, {B::output_link}, true},
                    {"editor", false, {B::preference_system}, true}};
    }
    return {};
}

} // namespace

PipelineTopology build_topology(Design design, const ModelSpec& vlm, const ModelSpec& llm, const PromptPack& pack,
                                const SdkSpec& sdk) {
    if (vlm.modality != Modality::vision) throw InvalidModality("vision slot bound to text model '" + vlm.id + "'");
    if (llm.modality != Modality::text) throw InvalidModality("text slot bound to vision model '" + llm.id + "'");

    PipelineTopology topology;
    topology.design = design;
    topology.prompt_pack_version = pack.version();
    const std::string d(to_string(design));
    const std::string sdk_reference = render_sdk_reference(sdk);
    for (const auto& slot : slots_for(design)) {
        const std::string prefix = d + "." + std::string(slot.id) + ".";
        TaskDef task;
        task.id = std::string(slot.id);
        task.design = design;
        task.description = pack.description(d, slot.id);
        task.expected_output = pack.value(prefix + "expected_output");
        task.context = pack.context(d, slot.id);
        task.receives_image = slot.vision;
        if (slot.writes_code) task.sdk_reference = sdk_reference;
        task.agent.agent_role = pack.value(prefix + "role");
        task.agent.goal = pack.value(prefix + "goal");
        task.agent.backstory = pack.value(prefix + "backstory");
        task.agent.model = slot.vision ? vlm : llm;
        task.agent.soar_blocks = slot.blocks;
        if (slot.vision) topology.entry_image_task = task.id;
        topology.tasks.push_back(std::move(task));
    }
    validate_topology(topology);
    return topology;
}

CompletionRequest render_prompt(const TaskDef& task, const RoleAssignment& assignment,
                                const std::map<std::string, std::string>& upstream) {
    if (assignment.role.empty()) throw ConfigError("role assignment is empty");
    const auto& role = assignment.role;

    CompletionRequest req;
    req.system_prompt = "You are the " + substitute_role(task.agent.agent_role, role) + ".\n" +
                        "Goal: " + substitute_role(task.agent.goal, role) + "\n" +
                        "Backstory: " + substitute_role(task.agent.backstory, role);

    std::string user = substitute_role(task.description, role);
    if (!task.sdk_reference.empty()) user += "\n\nAvailable robot functions:\n" + task.sdk_reference;
    for (const auto& id : task.context) {
        auto it = upstream.find(id);
        if (it == upstream.end()) throw MissingContext("task '" + task.id + "' needs the output of '" + id + "'");
        user += "\n\n=== CONTEXT FROM " + id + " BEGIN ===\n" + it->second + "\n=== CONTEXT FROM " + id + " END ===";
    }
    user += "\n\nExpected output: " + substitute_role(task.expected_output, role);
    req.user_message = std::move(user);

    if (task.receives_image) req.images.push_back(assignment.scenario.image_path());
    req.route = assignment.scenario.id + "/" + std::string(to_string(task.design)) + "/" + task.id;
    return req;
}

void BackendSet::bind(const std::string& model_id, std::shared_ptr<Backend> backend) {
    by_model_[model_id] = std::move(backend);
}

Backend& BackendSet::for_model(const ModelSpec& model) const {
    auto it = by_model_.find(model.id);
    if (it == by_model_.end() || !it->second) throw ConfigError("no backend bound for model '" + model.id + "'");
    return *it->second;
}

bool BackendSet::deterministic_for(const std::vector<ModelSpec>& models) const {
    return std::all_of(models.begin(), models.end(), [&](const ModelSpec& m) {
        auto it = by_model_.find(m.id);
        return it != by_model_.end() && it->second && it->second->deterministic();
    });
}

std::string failure_class_of(const std::exception& e) {
    if (dynamic_cast<const WireError*>(&e)) return "wire_error";
    if (dynamic_cast<const ModalityError*>(&e)) return "modality_error";
    if (dynamic_cast<const EmptyResponse*>(&e)) return "empty_response";
    if (dynamic_cast<const ImageUnreadable*>(&e)) return "image_unreadable";
    if (dynamic_cast<const MissingContext*>(&e)) return "missing_context";
    if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
    return "error";
}

PipelineRunResult execute_pipeline(const PipelineTopology& topology, const RoleAssignment& assignment,
                                   const BackendSet& backends, const ExecuteOptions& options) {
    const bool simulated_clock = backends.deterministic_for(topology.models());
    const auto started = std::chrono::steady_clock::now();

    PipelineRunResult result;
    double latency_total = 0.0;
    for (const auto& task : topology.tasks) {
        try {
            auto req = render_prompt(task, assignment, result.per_task_outputs);
            req.temperature = options.temperature;
            req.seed = options.seed;
            Backend& backend = backends.for_model(task.agent.model);
            const auto digest = request_digest(req);
            auto resp = complete(backend, task.agent.model, req);

            TranscriptRecord record;
            record.digest = digest;
            record.backend_id = backend.id();
            record.timestamp = utc_timestamp();
            record.task_id = task.id;
            record.model_id = task.agent.model.id;
            record.system_prompt = req.system_prompt;
            record.user_message = req.user_message;
            for (const auto& img : req.images) record.images.push_back(img.string());
            record.response = resp;

            latency_total += resp.latency_s;
            result.total_tokens_by_model[task.agent.model.id] += TokenUsage{resp.tokens_in, resp.tokens_out};
            result.tokens_estimated = result.tokens_estimated || resp.tokens_estimated;
            result.per_task_outputs[task.id] = resp.text;
            result.raw_plan_text = resp.text;
            result.transcript.push_back(std::move(record));
        } catch (const TaskFailure&) {
            throw;
        } catch (const Error& e) {
            throw TaskFailure(task.id, failure_class_of(e), e.what());
        }
    }

    if (simulated_clock) {
        result.wall_time_s = latency_total;
    } else {
        result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    return result;
}

} // namespace roleplan
