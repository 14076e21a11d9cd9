#include "roleplan/runner.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"
#include "roleplan/judge.hpp"
#include "roleplan/plan.hpp"
#include "roleplan/report.hpp"
#include "roleplan/scoring.hpp"
#include "roleplan/validation.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

namespace roleplan {

namespace fs = std::filesystem;

namespace {

nlohmann::json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Sequence: {
            auto out = nlohmann::json::array();
            for (const auto& item : node) out.push_back(yaml_to_json(item));
            return out;
        }
        case YAML::NodeType::Map: {
            auto out = nlohmann::json::object();
            for (const auto& entry : node) out[entry.first.as<std::string>()] = yaml_to_json(entry.second);
            return out;
        }
        case YAML::NodeType::Scalar: {
            const auto& s = node.Scalar();
            if (node.Tag() == "!") return s; // quoted
            if (s == "true") return true;
            if (s == "false") return false;
            if (s == "~" || s == "null") return nullptr;
            std::int64_t i = 0;
            if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i); ec == std::errc() && p == s.data() + s.size()) return i;
            double d = 0;
            if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d); ec == std::errc() && p == s.data() + s.size()) return d;
            return s;
        }
    }
    return nullptr;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return fs::weakly_canonical(path.is_absolute() ? path : base / path);
}

template <class T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + "." + key + ": missing or of the wrong type");
    }
}

ModelBinding model_from_json(const nlohmann::json& j, const std::string& where, Modality default_modality) {
    if (!j.is_object()) throw ConfigError(where + ": expected a mapping");
    ModelBinding m;
    m.spec.id = get_field<std::string>(j, "id", where);
    m.spec.family = j.contains("family") ? get_field<std::string>(j, "family", where) : m.spec.id;
    m.spec.modality = default_modality;
    if (j.contains("modality")) {
        try {
            m.spec.modality = parse_modality(get_field<std::string>(j, "modality", where));
        } catch (const Error& e) {
            throw ConfigError(where + ".modality: " + e.what());
        }
    }
    if (j.contains("endpoint") && !j.at("endpoint").is_null()) m.spec.endpoint = get_field<std::string>(j, "endpoint", where);
    if (j.contains("max_output_tokens")) m.spec.max_output_tokens = get_field<int>(j, "max_output_tokens", where);
    m.backend = get_field<std::string>(j, "backend", where);
    return m;
}

nlohmann::json model_to_json(const ModelBinding& m) {
    nlohmann::json j = {
        {"id", m.spec.id},
        {"family", m.spec.family},
        {"modality", to_string(m.spec.modality)},
        {"max_output_tokens", m.spec.max_output_tokens},
        {"backend", m.backend},
    };
    if (m.spec.endpoint) j["endpoint"] = *m.spec.endpoint;
    return j;
}

nlohmann::json backend_to_json(const BackendBinding& b) {
    nlohmann::json j = {{"type", b.type}};
    if (b.type == "mock") j["script"] = b.script.string();
    if (b.type == "replay") j["transcript"] = b.transcript.string();
    if (b.type == "http") {
        j["base_url"] = b.http.base_url;
        j["api_key_env"] = b.http.api_key_env;
        j["timeout_s"] = b.http.timeout_s;
    }
    return j;
}

BackendBinding backend_from_json(const nlohmann::json& j, const std::string& where, const fs::path& base) {
    BackendBinding b;
    b.type = get_field<std::string>(j, "type", where);
    if (b.type == "mock") {
        b.script = resolve(base, get_field<std::string>(j, "script", where));
    } else if (b.type == "replay") {
        b.transcript = resolve(base, get_field<std::string>(j, "transcript", where));
    } else if (b.type == "http") {
        b.http.base_url = get_field<std::string>(j, "base_url", where);
        if (j.contains("api_key_env")) b.http.api_key_env = get_field<std::string>(j, "api_key_env", where);
        if (j.contains("timeout_s")) b.http.timeout_s = get_field<double>(j, "timeout_s", where);
    } else {
        throw ConfigError(where + ".type: unknown backend type '" + b.type + "' (expected mock, http or replay)");
    }
    return b;
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& where) {
    if (j.is_string()) {
        std::vector<std::string> out;
        const auto s = j.get<std::string>();
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const auto end = std::min(s.find(',', pos), s.size());
            auto item = s.substr(pos, end - pos);
            item.erase(0, item.find_first_not_of(' '));
            item.erase(item.find_last_not_of(' ') + 1);
            if (!item.empty()) out.push_back(item);
            pos = end + 1;
        }
        return out;
    }
    if (!j.is_array()) throw ConfigError(where + ": expected a list");
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string()) throw ConfigError(where + ": expected strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Usd usd_or_zero(const PriceTable& prices, const std::string& id) {
    return prices.contains(id) ? prices.price(id) : Usd{};
}

} // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    const auto data = data_dir();
    c.scenarios = builtin_scenario_ids();
    c.prices = data / "prices.yaml";
    c.prompt_pack = data / "prompts" / "v1";
    c.sdk = data / "sdk" / "registry.txt";
    c.vision.spec = {"minicpm-v-2.6", "minicpm", Modality::vision, {}, std::nullopt, 1024};
    c.vision.backend = "mock";
    c.text.spec = {"llama3-8b", "llama", Modality::text, {}, std::nullopt, 1024};
    c.text.backend = "mock";
    BackendBinding mock;
    mock.type = "mock";
    mock.script = data / "mock" / "script.json";
    c.backends["mock"] = mock;
    return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("configuration must be a mapping");
    static const std::set<std::string> known = {"designs", "scenarios", "repetitions", "seed", "parallelism", "temperature",
                                                "output", "prices", "prompt_pack", "sdk", "models", "backends", "judge"};
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");

    ExperimentConfig c = defaults();
    if (j.contains("designs")) {
        c.designs.clear();
        for (const auto& d : string_list(j.at("designs"), "designs")) c.designs.push_back(parse_design(d));
    }
    if (j.contains("scenarios")) {
        c.scenarios.clear();
        for (const auto& s : string_list(j.at("scenarios"), "scenarios")) {
            const bool builtin = std::find(c.scenarios.begin(), c.scenarios.end(), s) != c.scenarios.end() ||
                                 (s.find('/') == std::string::npos && !s.ends_with(".yaml"));
            c.scenarios.push_back(builtin ? s : resolve(base_dir, s).string());
        }
    }
    if (j.contains("repetitions")) c.repetitions = get_field<int>(j, "repetitions", "config");
    if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", "config");
    if (j.contains("parallelism")) c.parallelism = get_field<int>(j, "parallelism", "config");
    if (j.contains("temperature")) c.temperature = get_field<double>(j, "temperature", "config");
    if (j.contains("output")) c.output_dir = get_field<std::string>(j, "output", "config");
    if (j.contains("prices")) c.prices = resolve(base_dir, get_field<std::string>(j, "prices", "config"));
    if (j.contains("prompt_pack")) c.prompt_pack = resolve(base_dir, get_field<std::string>(j, "prompt_pack", "config"));
    if (j.contains("sdk")) c.sdk = resolve(base_dir, get_field<std::string>(j, "sdk", "config"));
    if (j.contains("models")) {
        const auto& m = j.at("models");
        if (m.contains("vision")) c.vision = model_from_json(m.at("vision"), "models.vision", Modality::vision);
        if (m.contains("text")) c.text = model_from_json(m.at("text"), "models.text", Modality::text);
    }
    if (j.contains("backends")) {
        if (!j.at("backends").is_object()) throw ConfigError("backends: expected a mapping");
        for (const auto& [name, b] : j.at("backends").items()) c.backends[name] = backend_from_json(b, "backends." + name, base_dir);
    }
    if (j.contains("judge") && !j.at("judge").is_null()) {
        const auto& jj = j.at("judge");
        JudgeSettings s;
        s.model = model_from_json(jj.at("model"), "judge.model", Modality::text);
        s.rubric = resolve(base_dir, get_field<std::string>(jj, "rubric", "judge"));
        if (jj.contains("seed")) s.seed = get_field<std::uint64_t>(jj, "seed", "judge");
        if (jj.contains("anonymize")) s.anonymize = get_field<bool>(jj, "anonymize", "judge");
        c.judge = s;
    }
    return c;
}

ExperimentConfig ExperimentConfig::parse_yaml(std::string_view text, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("configuration is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) return from_json(nlohmann::json::object(), base_dir);
    return from_json(yaml_to_json(root), base_dir);
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("configuration file not found: " + path.string());
    const auto text = read_text_file(path);
    const auto base = fs::absolute(path).parent_path();
    if (path.extension() == ".json") {
        try {
            return from_json(nlohmann::json::parse(text), base);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
        }
    }
    return parse_yaml(text, base);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json designs_json = nlohmann::json::array();
    for (auto d : designs) designs_json.push_back(std::string(to_string(d)));
    nlohmann::json backends_json = nlohmann::json::object();
    for (const auto& [name, b] : backends) backends_json[name] = backend_to_json(b);
    nlohmann::json j = {
        {"designs", designs_json},
        {"scenarios", scenarios},
        {"repetitions", repetitions},
        {"seed", seed},
        {"parallelism", parallelism},
        {"temperature", temperature},
        {"output", fs::absolute(output_dir).lexically_normal().string()},
        {"prices", prices.string()},
        {"prompt_pack", prompt_pack.string()},
        {"sdk", sdk.string()},
        {"models", {{"vision", model_to_json(vision)}, {"text", model_to_json(text)}}},
        {"backends", backends_json},
        {"judge", nullptr},
    };
    if (judge) {
        j["judge"] = {
            {"model", model_to_json(judge->model)},
            {"rubric", judge->rubric.string()},
            {"seed", judge->seed},
            {"anonymize", judge->anonymize},
        };
    }
    return j;
}

void ExperimentConfig::validate() const {
    if (designs.empty()) throw ConfigError("no designs selected");
    if (scenarios.empty()) throw ConfigError("no scenarios selected");
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (temperature < 0) throw ConfigError("temperature must be non-negative");
    for (const auto& [what, path] : {std::pair{"prices", prices}, {"sdk", sdk}}) {
        if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " file not found: " + path.string());
    }
    if (!fs::is_directory(prompt_pack)) throw ConfigError("prompt pack directory not found: " + prompt_pack.string());
    if (vision.spec.modality != Modality::vision) throw ConfigError("models.vision must be a vision model");
    if (text.spec.modality != Modality::text) throw ConfigError("models.text must be a text model");

    auto check_binding = [&](const ModelBinding& m, const std::string& where) {
        auto it = backends.find(m.backend);
        if (it == backends.end()) throw ConfigError(where + ".backend: no backend named '" + m.backend + "'");
        const auto& b = it->second;
        if (b.type == "mock" && !fs::is_regular_file(b.script)) throw ConfigError("mock script not found: " + b.script.string());
        if (b.type == "replay" && !fs::is_regular_file(b.transcript))
            throw ConfigError("replay transcript not found: " + b.transcript.string());
    };
    check_binding(vision, "models.vision");
    check_binding(text, "models.text");
    if (judge) {
        check_binding(judge->model, "judge.model");
        if (!fs::is_regular_file(judge->rubric)) throw ConfigError("judge rubric not found: " + judge->rubric.string());
    }
    for (const auto& s : scenarios) {
        const auto ids = builtin_scenario_ids();
        if (std::find(ids.begin(), ids.end(), s) == ids.end() && !fs::is_regular_file(s))
            throw ConfigError("scenario '" + s + "' is neither builtin nor an existing file");
    }
}

std::string ExperimentConfig::digest() const {
    auto j = to_json();
    j.erase("repetitions");
    j.erase("parallelism");
    j.erase("output");
    j.erase("judge");
    return sha256_hex(j.dump());
}

std::shared_ptr<Backend> make_backend(const BackendBinding& binding) {
    if (binding.type == "mock") return std::make_shared<MockBackend>(MockBackend::from_file(binding.script));
    if (binding.type == "http") return std::make_shared<HttpBackend>(binding.http);
    if (binding.type == "replay") return std::make_shared<ReplayBackend>(TranscriptStore::read(binding.transcript));
    throw ConfigError("unknown backend type '" + binding.type + "'");
}

Experiment Experiment::prepare(const ExperimentConfig& config) {
    config.validate();
    Experiment e{config, PriceTable::load(config.prices), PromptPack::load(config.prompt_pack), load_sdk(config.sdk), {}, {}, {}};
    for (auto* m : {&e.config.vision, &e.config.text}) {
        if (!e.prices.contains(m->spec.id)) throw ConfigError("model '" + m->spec.id + "' has no price in " + config.prices.string());
        m->spec.price_per_mtok = e.prices.price(m->spec.id);
    }
    if (e.config.judge) {
        check_judge_family(e.config.judge->model.spec, e.pipeline_models());
        e.config.judge->model.spec.price_per_mtok = usd_or_zero(e.prices, e.config.judge->model.spec.id);
    }

    std::set<std::string> ids;
    for (const auto& s : config.scenarios) {
        auto spec = resolve_scenario(s);
        if (!ids.insert(spec.id).second) throw ConfigError("scenario '" + spec.id + "' listed twice");
        e.scenarios.push_back(std::move(spec));
    }
    for (auto d : config.designs)
        e.topologies.emplace(d, build_topology(d, e.config.vision.spec, e.config.text.spec, e.pack, e.sdk));

    std::map<std::string, std::shared_ptr<Backend>> made;
    for (const auto* m : {&e.config.vision, &e.config.text}) {
        if (!made.contains(m->backend)) made[m->backend] = make_backend(config.backends.at(m->backend));
        e.backends.bind(m->spec.id, made[m->backend]);
    }
    return e;
}

const ScenarioSpec& Experiment::scenario(std::string_view id) const {
    auto it = std::find_if(scenarios.begin(), scenarios.end(), [&](const ScenarioSpec& s) { return s.id == id; });
    if (it == scenarios.end()) throw NotFound("scenario '" + std::string(id) + "' is not part of this experiment");
    return *it;
}

std::vector<ModelSpec> Experiment::pipeline_models() const {
    return {config.vision.spec, config.text.spec};
}

std::string run_key(Design design, std::string_view scenario_id, int repetition, std::string_view config_digest) {
    return sha256_hex(std::string(to_string(design)) + '\n' + std::string(scenario_id) + '\n' + std::to_string(repetition) + '\n' +
                      std::string(config_digest));
}

std::string record_id(Design design, std::string_view scenario_id, int repetition, int repetitions) {
    const auto width = std::max<std::size_t>(2, std::to_string(repetitions).size());
    auto rep = std::to_string(repetition);
    rep.insert(0, width > rep.size() ? width - rep.size() : 0, '0');
    return std::string(to_string(design)) + "." + std::string(scenario_id) + ".r" + rep;
}

void attach_oracle_scores(RunRecord& record, const ScenarioSpec& scenario, const SdkSpec& sdk) {
    if (record.status != RunStatus::completed) return;
    const auto plan = parse_plan(record.plan_text);
    const auto report = validate(plan, sdk, scenario);
    record.oracle = oracle_scores(plan, report, scenario);
    record.residue_lines = plan.residue.size();
}

namespace {

struct Job {
    Design design;
    const ScenarioSpec* scenario;
    int repetition;
    std::string key;
    std::string id;
};

RunRecord execute_job(const Experiment& e, const Job& job, const fs::path& dir) {
    const auto& topology = e.topologies.at(job.design);
    RunRecord r;
    r.record_id = job.id;
    r.run_key = job.key;
    r.scenario_id = job.scenario->id;
    r.role = job.scenario->role;
    r.design = std::string(to_string(job.design));
    r.repetition = job.repetition;
    r.seed = e.config.seed + static_cast<std::uint64_t>(job.repetition);
    r.temperature = e.config.temperature;
    r.agent_models = topology.agent_models();
    r.transcript_ref = "transcripts/" + job.id + ".jsonl";

    ExecuteOptions options;
    options.temperature = e.config.temperature;
    options.seed = static_cast<std::int64_t>(r.seed);
    try {
        auto result = execute_pipeline(topology, RoleAssignment::for_scenario(*job.scenario), e.backends, options);
        r.plan_text = result.raw_plan_text;
        r.wall_time_s = result.wall_time_s;
        r.tokens = result.total_tokens_by_model;
        r.tokens_estimated = result.tokens_estimated;
        r.cost_usd = compute_cost(r.tokens, e.prices);

        const auto path = dir / r.transcript_ref;
        fs::remove(path);
        TranscriptStore(path).append_all(result.transcript);
        attach_oracle_scores(r, *job.scenario, e.sdk);
    } catch (const TaskFailure& f) {
        r.status = RunStatus::failed;
        r.failure_class = f.failure_class();
        r.failed_task = f.task_id();
        r.failure_message = f.what();
    } catch (const std::exception& ex) {
        r.status = RunStatus::failed;
        r.failure_class = failure_class_of(ex);
        r.failure_message = ex.what();
    }
    return r;
}

std::vector<std::string> write_report(const fs::path& dir, const std::vector<RunRecord>& records, const PriceTable& prices) {
    const bool any_oracle = std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.oracle.has_value(); });
    const bool any_judge = std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.judge.has_value(); });
    const auto source = !any_oracle && any_judge ? ScoreSource::judge : ScoreSource::oracle;
    return export_report(aggregate(records, source), records, prices, dir);
}

} // namespace

RunSummary cmd_run(const ExperimentConfig& config, std::ostream& log) {
    const auto started_at = utc_timestamp();
    const Experiment e = Experiment::prepare(config);
    const fs::path dir = fs::absolute(config.output_dir).lexically_normal();
    fs::create_directories(dir / "transcripts");
    write_json_file(dir / "config.json", config.to_json());

    RunSummary summary;
    summary.dir = dir;
    const auto records_path = dir / "records.jsonl";

    std::map<std::string, RunRecord> by_key;
    if (fs::exists(records_path))
        for (auto& r : read_records(records_path)) by_key[r.run_key] = std::move(r);

    const auto digest = config.digest();
    std::vector<Job> jobs;
    for (auto d : config.designs) {
        for (const auto& s : e.scenarios) {
            for (int rep = 1; rep <= config.repetitions; ++rep) {
                Job job{d, &s, rep, run_key(d, s.id, rep, digest), record_id(d, s.id, rep, config.repetitions)};
                auto it = by_key.find(job.key);
                if (it != by_key.end() && it->second.status == RunStatus::completed) {
                    ++summary.skipped;
                    continue;
                }
                jobs.push_back(std::move(job));
            }
        }
    }
    log << "running " << jobs.size() << " pipeline run(s), skipping " << summary.skipped << " already completed\n";

    std::vector<RunRecord> fresh(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex append_mutex;
    std::ofstream appender(records_path, std::ios::app);
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            fresh[i] = execute_job(e, jobs[i], dir);
            std::lock_guard lock(append_mutex);
            appender << to_json(fresh[i]).dump() << '\n';
            appender.flush();
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    appender.close();

    for (auto& r : fresh) {
        ++summary.executed;
        if (r.status == RunStatus::failed) {
            ++summary.failed;
            summary.warnings.push_back("run " + r.record_id + " failed: " + r.failure_message.value_or("unknown error"));
        }
        by_key[r.run_key] = std::move(r);
    }
    std::vector<RunRecord> all;
    for (auto& [key, r] : by_key) all.push_back(std::move(r));
    write_records(records_path, all);

    for (auto& w : write_report(dir, all, e.prices)) summary.warnings.push_back(std::move(w));
    write_json_file(dir / "meta.json", {
                                           {"started_at", started_at},
                                           {"finished_at", utc_timestamp()},
                                           {"executed", summary.executed},
                                           {"skipped", summary.skipped},
                                           {"failed", summary.failed},
                                           {"prompt_pack_version", e.pack.version()},
                                       });
    log << "wrote " << all.size() << " record(s) to " << records_path.string() << '\n';
    return summary;
}

ExperimentConfig load_run_config(const fs::path& dir) {
    const auto path = dir / "config.json";
    if (!fs::exists(path)) throw NotFound("no config.json in run directory " + dir.string());
    try {
        return ExperimentConfig::from_json(nlohmann::json::parse(read_text_file(path)), dir);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config.json is not valid JSON: " + std::string(e.what()));
    }
}

void cmd_evaluate(const fs::path& dir, const EvaluateOptions& options, std::ostream& log) {
    if (!options.oracle && !options.judge) throw ConfigError("select --oracle, --judge or --both");
    auto config = load_run_config(dir);
    if (options.extra_backends)
        for (const auto& [name, b] : *options.extra_backends) config.backends[name] = b;
    if (options.judge_override) config.judge = options.judge_override;
    if (options.judge && !config.judge) throw ConfigError("--judge needs a judge section in the configuration");

    const auto records_path = dir / "records.jsonl";
    if (!fs::exists(records_path)) throw NotFound("no records.jsonl in " + dir.string());
    auto records = read_records(records_path);
    const Experiment e = Experiment::prepare(config);

    if (options.oracle) {
        for (auto& r : records) attach_oracle_scores(r, e.scenario(r.scenario_id), e.sdk);
        log << "oracle scores attached to " << records.size() << " record(s)\n";
    }

    if (options.judge) {
        const auto& js = *e.config.judge;
        check_judge_family(js.model.spec, e.pipeline_models());
        JudgeConfig jc;
        jc.model = js.model.spec;
        jc.rubric = read_text_file(js.rubric);
        jc.shuffle_seed = js.seed;
        jc.anonymize = js.anonymize;

        std::vector<JudgeItem> items;
        std::vector<RunRecord*> targets;
        for (auto& r : records) {
            if (r.status != RunStatus::completed) continue;
            JudgeItem item;
            item.item_id = r.record_id;
            item.role = r.role;
            item.plan_text = r.plan_text;
            item.design = r.design;
            for (const auto& m : e.pipeline_models()) {
                item.model_ids.push_back(m.id);
                item.model_families.push_back(m.family);
            }
            items.push_back(std::move(item));
            targets.push_back(&r);
        }
        const auto backend = make_backend(e.config.backends.at(js.model.backend));
        const auto outcomes = judge_scores(items, jc, e.pipeline_models(), *backend);

        std::ofstream judge_log(dir / "judge.jsonl", std::ios::trunc);
        std::size_t failed = 0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            targets[i]->judge = outcomes[i].scores;
            targets[i]->judge_failed = outcomes[i].judge_failed;
            failed += outcomes[i].judge_failed ? 1 : 0;
            judge_log << nlohmann::json{{"record_id", outcomes[i].item_id},
                                        {"submission_index", outcomes[i].submission_index},
                                        {"prompt", outcomes[i].prompt},
                                        {"response", outcomes[i].raw_response},
                                        {"judge_failed", outcomes[i].judge_failed}}
                             .dump()
                      << '\n';
        }
        log << "judge scores attached to " << outcomes.size() - failed << " record(s)";
        if (failed > 0) log << ", " << failed << " marked judge_failed";
        log << '\n';
    }
    write_records(records_path, records);
}

std::vector<std::string> cmd_report(const fs::path& dir, std::ostream& log) {
    const auto config = load_run_config(dir);
    const auto records_path = dir / "records.jsonl";
    if (!fs::exists(records_path)) throw NotFound("no records.jsonl in " + dir.string());
    const auto records = read_records(records_path);
    auto warnings = write_report(dir, records, PriceTable::load(config.prices));
    log << "report written to " << dir.string() << '\n';
    return warnings;
}

void cmd_replay(const fs::path& dir, std::string_view id, bool verify, std::ostream& out) {
    const auto records_path = dir / "records.jsonl";
    if (!fs::exists(records_path)) throw NotFound("no records.jsonl in " + dir.string());
    const auto records = read_records(records_path);
    auto it = std::find_if(records.begin(), records.end(), [&](const RunRecord& r) { return r.record_id == id; });
    if (it == records.end()) throw NotFound("no record '" + std::string(id) + "' in " + dir.string());
    const RunRecord& record = *it;
    const auto transcript_path = dir / record.transcript_ref;
    if (record.transcript_ref.empty() || !fs::exists(transcript_path)) throw NotFound("no transcript for record '" + std::string(id) + "'");
    const auto transcript = TranscriptStore::read(transcript_path);

    out << "record " << record.record_id << "  design=" << record.design << "  scenario=" << record.scenario_id
        << "  role=\"" << record.role << "\"  status=" << to_string(record.status) << '\n';
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const auto& t = transcript[i];
        out << "\n[" << i + 1 << "/" << transcript.size() << "] " << t.task_id << "  model=" << t.model_id
            << "  tokens_in=" << t.response.tokens_in << "  tokens_out=" << t.response.tokens_out
            << (t.response.tokens_estimated ? " (estimated)" : "") << "  latency=" << format_number(t.response.latency_s) << "s\n";
        out << "--- system ---\n" << t.system_prompt << '\n';
        out << "--- user ---\n" << t.user_message << '\n';
        for (const auto& img : t.images) out << "--- image: " << img << '\n';
        out << "--- response ---\n" << t.response.text << '\n';
    }

    if (!verify) return;
    auto config = load_run_config(dir);
    BackendBinding replay;
    replay.type = "replay";
    replay.transcript = transcript_path;
    config.backends = {{"replay", replay}};
    config.vision.backend = "replay";
    config.text.backend = "replay";
    config.designs = {parse_design(record.design)};
    config.judge.reset();
    const Experiment e = Experiment::prepare(config);

    const auto& scenario = e.scenario(record.scenario_id);
    ExecuteOptions options;
    options.temperature = record.temperature;
    options.seed = static_cast<std::int64_t>(record.seed);
    const auto result = execute_pipeline(e.topologies.at(parse_design(record.design)), RoleAssignment::for_scenario(scenario),
                                         e.backends, options);
    RunRecord again = record;
    again.plan_text = result.raw_plan_text;
    again.tokens = result.total_tokens_by_model;
    attach_oracle_scores(again, scenario, e.sdk);

    std::vector<std::string> diverged;
    if (again.plan_text != record.plan_text) diverged.push_back("plan text");
    if (again.tokens != record.tokens) diverged.push_back("token counts");
    if (record.oracle && again.oracle != record.oracle) diverged.push_back("oracle scores");
    if (!diverged.empty()) {
        std::string what;
        for (const auto& d : diverged) what += (what.empty() ? "" : ", ") + d;
        throw Error("replay diverged from the recorded run: " + what);
    }
    out << "\nreplay verified: plan text, token counts and oracle scores match\n";
}

} // namespace roleplan
