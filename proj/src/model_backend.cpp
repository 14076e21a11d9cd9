#include "roleplan/model_backend.hpp"

#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>

namespace roleplan {

using json = nlohmann::json;

std::string_view to_string(Modality m) {
    return m == Modality::vision ? "vision" : "text";
}

Modality parse_modality(std::string_view text) {
    if (text == "vision") return Modality::vision;
    if (text == "text") return Modality::text;
    throw SchemaError("modality", "expected 'text' or 'vision', got '" + std::string(text) + "'");
}

json to_json(const TranscriptRecord& r) {
    return json{
        {"digest", r.digest},
        {"task_id", r.task_id},
        {"model_id", r.model_id},
        {"backend_id", r.backend_id},
        {"timestamp", r.timestamp},
        {"request", {{"system_prompt", r.system_prompt}, {"user_message", r.user_message}, {"images", r.images}}},
        {"response",
         {{"text", r.response.text},
          {"tokens_in", r.response.tokens_in},
          {"tokens_out", r.response.tokens_out},
          {"latency_s", r.response.latency_s},
          {"tokens_estimated", r.response.tokens_estimated}}},
    };
}

TranscriptRecord transcript_record_from_json(const json& j) {
    TranscriptRecord r;
    r.digest = j.at("digest").get<std::string>();
    r.task_id = j.value("task_id", "");
    r.model_id = j.value("model_id", "");
    r.backend_id = j.value("backend_id", "");
    r.timestamp = j.value("timestamp", "");
    if (auto it = j.find("request"); it != j.end()) {
        r.system_prompt = it->value("system_prompt", "");
        r.user_message = it->value("user_message", "");
        r.images = it->value("images", std::vector<std::string>{});
    }
    const auto& resp = j.at("response");
    r.response.text = resp.at("text").get<std::string>();
    r.response.tokens_in = resp.value("tokens_in", std::int64_t{0});
    r.response.tokens_out = resp.value("tokens_out", std::int64_t{0});
    r.response.latency_s = resp.value("latency_s", 0.0);
    r.response.tokens_estimated = resp.value("tokens_estimated", false);
    return r;
}

std::string request_digest(const CompletionRequest& req) {
    // Length-prefixed fields so that moving text between fields changes the digest.
    std::string material;
    auto put = [&](std::string_view field) {
        material += std::to_string(field.size());
        material += ':';
        material += field;
        material += ';';
    };
    put(req.system_prompt);
    put(req.user_message);
    for (const auto& image : req.images) put(sha256_hex(read_binary_file(image)));
    return sha256_hex(material);
}

std::int64_t count_tokens(std::string_view text, const ModelSpec& /*model*/) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::int64_t resolve_token_count(std::optional<std::int64_t> reported, std::string_view text, const ModelSpec& model) {
    if (reported) return *reported;
    return count_tokens(text, model);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

CompletionResponse complete(Backend& backend, const ModelSpec& model, const CompletionRequest& req) {
    if (!req.images.empty() && !model.accepts_images()) {
        throw ModalityError("model '" + model.id + "' is text-only but the request carries " +
                            std::to_string(req.images.size()) + " image(s)");
    }
    if (req.user_message.empty()) throw Error("completion request has an empty user message");

    CompletionResponse first = backend.send(model, req);
    if (!is_blank(first.text)) return first;

    CompletionResponse second = backend.send(model, req);
    if (is_blank(second.text)) {
        throw EmptyResponse("model '" + model.id + "' returned no text after one retry");
    }
    second.latency_s += first.latency_s;
    second.tokens_in += first.tokens_in;
    second.tokens_out += first.tokens_out;
    second.tokens_estimated = second.tokens_estimated || first.tokens_estimated;
    return second;
}

// --- MockBackend -----------------------------------------------------------

MockBackend::MockBackend(std::map<std::string, ScriptedReply> script, std::string id)
    : script_(script.begin(), script.end()), id_(std::move(id)) {}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw SchemaError(path.string(), e.what());
    }
    if (!doc.is_object()) throw SchemaError(path.string(), "mock script must be a JSON object");
    std::map<std::string, ScriptedReply> script;
    for (const auto& [route, entry] : doc.items()) {
        if (!route.empty() && route.front() == '_') continue; // comments
        ScriptedReply reply;
        try {
            reply.text = entry.at("text").get<std::string>();
            reply.tokens_in = entry.value("tokens_in", std::int64_t{0});
            reply.tokens_out = entry.value("tokens_out", std::int64_t{0});
            reply.latency_s = entry.value("latency_s", 0.0);
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + route, e.what());
        }
        script.emplace(route, std::move(reply));
    }
    return MockBackend(std::move(script));
}

const ScriptedReply* MockBackend::lookup(std::string_view route) const {
    std::string key(route);
    while (true) {
        if (auto it = script_.find(key); it != script_.end()) return &it->second;
        // "s/d/t" -> "s/t" -> "t"
        const auto first = key.find('/');
        if (first == std::string::npos) return nullptr;
        const auto last = key.rfind('/');
        if (first == last) {
            key = key.substr(last + 1);
        } else {
            key = key.substr(0, first) + key.substr(last);
        }
    }
}

CompletionResponse MockBackend::send(const ModelSpec& /*model*/, const CompletionRequest& req) {
    const ScriptedReply* reply = lookup(req.route);
    if (reply == nullptr) throw WireError("mock backend has no scripted reply for route '" + req.route + "'");
    return CompletionResponse{reply->text, reply->tokens_in, reply->tokens_out, reply->latency_s, false};
}

// --- TranscriptStore -------------------------------------------------------

TranscriptStore::TranscriptStore(std::filesystem::path path) : path_(std::move(path)) {}

void TranscriptStore::append(const TranscriptRecord& record) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to transcript store " + path_.string());
    out << to_json(record).dump() << '\n';
}

void TranscriptStore::append_all(const std::vector<TranscriptRecord>& records) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to transcript store " + path_.string());
    for (const auto& record : records) out << to_json(record).dump() << '\n';
}

std::vector<TranscriptRecord> TranscriptStore::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("transcript store not found: " + path.string());
    std::vector<TranscriptRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(transcript_record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no), e.what());
        }
    }
    return records;
}

// --- ReplayBackend ---------------------------------------------------------

ReplayBackend::ReplayBackend(const std::vector<TranscriptRecord>& records) {
    for (const auto& r : records) by_digest_.try_emplace(r.digest, r.response);
}

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path) {
    return ReplayBackend(TranscriptStore::read(path));
}

void ReplayBackend::add(const TranscriptRecord& record) {
    std::lock_guard lock(mutex_);
    by_digest_.try_emplace(record.digest, record.response);
}

std::size_t ReplayBackend::size() const {
    std::lock_guard lock(mutex_);
    return by_digest_.size();
}

CompletionResponse ReplayBackend::send(const ModelSpec& /*model*/, const CompletionRequest& req) {
    const std::string digest = request_digest(req);
    std::lock_guard lock(mutex_);
    auto it = by_digest_.find(digest);
    if (it == by_digest_.end()) throw WireError("replay store has no response for request digest " + digest);
    return it->second;
}

} // namespace roleplan
