#include "roleplan/records.hpp"

#include "roleplan/errors.hpp"

#include <algorithm>
#include <fstream>

namespace roleplan {

std::string_view to_string(RunStatus s) {
    return s == RunStatus::completed ? "completed" : "failed";
}

RunStatus parse_run_status(std::string_view text) {
    if (text == "completed") return RunStatus::completed;
    if (text == "failed") return RunStatus::failed;
    throw SchemaError("status", "unknown run status '" + std::string(text) + "'");
}

namespace {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

} // namespace

nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json tokens = nlohmann::json::object();
    for (const auto& [model, usage] : r.tokens) tokens[model] = {{"tokens_in", usage.tokens_in}, {"tokens_out", usage.tokens_out}};
    nlohmann::json scores = nlohmann::json::object();
    if (r.oracle) scores["oracle"] = to_json(*r.oracle);
    if (r.judge) scores["judge"] = to_json(*r.judge);
    return {
        {"record_id", r.record_id},
        {"run_key", r.run_key},
        {"scenario", r.scenario_id},
        {"role", r.role},
        {"design", r.design},
        {"repetition", r.repetition},
        {"seed", r.seed},
        {"temperature", r.temperature},
        {"status", to_string(r.status)},
        {"failure_class", optional_json(r.failure_class)},
        {"failed_task", optional_json(r.failed_task)},
        {"failure_message", optional_json(r.failure_message)},
        {"plan_text", r.plan_text},
        {"agent_models", r.agent_models},
        {"wall_time_s", r.wall_time_s},
        {"tokens", tokens},
        {"tokens_estimated", r.tokens_estimated},
        {"cost_usd", r.cost_usd.str()},
        {"transcript", r.transcript_ref},
        {"scores", scores},
        {"judge_failed", r.judge_failed},
        {"residue_lines", r.residue_lines},
    };
}

RunRecord run_record_from_json(const nlohmann::json& j) {
    try {
        RunRecord r;
        r.record_id = j.at("record_id").get<std::string>();
        r.run_key = j.at("run_key").get<std::string>();
        r.scenario_id = j.at("scenario").get<std::string>();
        r.role = j.value("role", "");
        r.design = j.at("design").get<std::string>();
        r.repetition = j.at("repetition").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.temperature = j.value("temperature", 0.0);
        r.status = parse_run_status(j.at("status").get<std::string>());
        r.failure_class = optional_string(j, "failure_class");
        r.failed_task = optional_string(j, "failed_task");
        r.failure_message = optional_string(j, "failure_message");
        r.plan_text = j.value("plan_text", "");
        r.agent_models = j.value("agent_models", std::vector<std::string>{});
        r.wall_time_s = j.at("wall_time_s").get<double>();
        for (const auto& [model, usage] : j.at("tokens").items())
            r.tokens[model] = {usage.at("tokens_in").get<std::int64_t>(), usage.at("tokens_out").get<std::int64_t>()};
        r.tokens_estimated = j.value("tokens_estimated", false);
        r.cost_usd = Usd::parse(j.at("cost_usd").get<std::string>());
        r.transcript_ref = j.value("transcript", "");
        if (j.contains("scores")) {
            const auto& s = j.at("scores");
            if (s.contains("oracle")) r.oracle = metric_scores_from_json(s.at("oracle"));
            if (s.contains("judge")) r.judge = metric_scores_from_json(s.at("judge"));
        }
        r.judge_failed = j.value("judge_failed", false);
        r.residue_lines = j.value("residue_lines", std::size_t{0});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("record", e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError("record.cost_usd", e.what());
    }
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open records file " + path.string());
    std::vector<RunRecord> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(run_record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(path.filename().string() + ":" + std::to_string(n), e.what());
        }
    }
    return out;
}

void write_records(const std::filesystem::path& path, std::vector<RunRecord> records) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        for (const auto& r : records) out << to_json(r).dump() << '\n';
        if (!out) throw Error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace roleplan
