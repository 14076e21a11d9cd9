#pragma once

#include "roleplan/money.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace roleplan {

enum class Modality { text, vision };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view text);

struct ModelSpec {
    std::string id;
    // Model family ("minicpm", "llama", "gpt"); used to keep judges out of the pipeline family.
    std::string family;
    Modality modality = Modality::text;
    Usd price_per_mtok;
    std::optional<std::string> endpoint;
    int max_output_tokens = 1024;

    bool accepts_images() const { return modality == Modality::vision; }
};

struct CompletionRequest {
    std::string system_prompt;
    std::string user_message;
    std::vector<std::filesystem::path> images;
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
    // "<scenario>/<design>/<task>" routing label for scripted backends. Not part of the digest.
    std::string route;
};

struct CompletionResponse {
    std::string text;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    double latency_s = 0.0;
    // Set when either count came from the ceil(chars/4) fallback instead of backend usage.
    bool tokens_estimated = false;

    friend bool operator==(const CompletionResponse&, const CompletionResponse&) = default;
};

struct TranscriptRecord {
    std::string digest;
    CompletionResponse response;
    std::string backend_id;
    std::string timestamp;
    std::string task_id;
    std::string model_id;
    std::string system_prompt;
    std::string user_message;
    std::vector<std::string> images;
};

nlohmann::json to_json(const TranscriptRecord& record);
TranscriptRecord transcript_record_from_json(const nlohmann::json& j);

// Stable hex digest over system prompt, user message and the SHA-256 of each image's bytes.
std::string request_digest(const CompletionRequest& req);

// Fallback estimate ceil(chars / 4).
std::int64_t count_tokens(std::string_view text, const ModelSpec& model);

// Backend-reported usage passes through verbatim; otherwise the estimate is used.
std::int64_t resolve_token_count(std::optional<std::int64_t> reported, std::string_view text, const ModelSpec& model);

std::string utc_timestamp();

// A model engine. Implementations must tolerate concurrent send() calls.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string id() const = 0;

    // True when responses (including reported latency) depend only on the request.
    virtual bool deterministic() const { return false; }

    virtual CompletionResponse send(const ModelSpec& model, const CompletionRequest& req) = 0;
};

// Checks modality before any traffic, then sends; an empty reply is re-requested once
// before EmptyResponse is thrown. Latency of both attempts is charged to the result.
CompletionResponse complete(Backend& backend, const ModelSpec& model, const CompletionRequest& req);

struct ScriptedReply {
    std::string text;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    double latency_s = 0.0;
};

// Serves fixed replies keyed by route. A route "s/d/t" falls back to "s/t", then "t".
class MockBackend : public Backend {
public:
    explicit MockBackend(std::map<std::string, ScriptedReply> script, std::string id = "mock");

    // JSON object: route -> {text, tokens_in, tokens_out, latency_s}.
    static MockBackend from_file(const std::filesystem::path& path);

    std::string id() const override { return id_; }
    bool deterministic() const override { return true; }
    CompletionResponse send(const ModelSpec& model, const CompletionRequest& req) override;

    const ScriptedReply* lookup(std::string_view route) const;

private:
    std::map<std::string, ScriptedReply, std::less<>> script_;
    std::string id_;
};

// Append-only JSONL store of transcript records. Appends are serialized internally.
class TranscriptStore {
public:
    explicit TranscriptStore(std::filesystem::path path);

    void append(const TranscriptRecord& record);
    void append_all(const std::vector<TranscriptRecord>& records);

    const std::filesystem::path& path() const { return path_; }

    static std::vector<TranscriptRecord> read(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

// Answers requests from recorded transcripts by request digest. The first record for a
// digest wins, so one run's transcript replays that run exactly.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::vector<TranscriptRecord>& records);

    static ReplayBackend from_file(const std::filesystem::path& path);

    std::string id() const override { return "replay"; }
    bool deterministic() const override { return true; }
    CompletionResponse send(const ModelSpec& model, const CompletionRequest& req) override;

    void add(const TranscriptRecord& record);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CompletionResponse> by_digest_;
};

struct HttpBackendOptions {
    // e.g. "http://127.0.0.1:8080/v1"; the request goes to <base_url>/chat/completions.
    std::string base_url;
    // Name of the environment variable holding the bearer token; empty for none.
    std::string api_key_env;
    double timeout_s = 120.0;
};

// Chat-completions JSON over HTTP, images sent as base64 data URLs.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    std::string id() const override { return "http:" + options_.base_url; }
    CompletionResponse send(const ModelSpec& model, const CompletionRequest& req) override;

    // Exposed for tests: the JSON body that send() posts.
    static nlohmann::json build_request_body(const ModelSpec& model, const CompletionRequest& req);

    // Exposed for tests: extracts text and usage from a response body. When usage is absent
    // the counts are estimated from the reply and, if given, the originating request.
    static CompletionResponse parse_response_body(const ModelSpec& model, std::string_view body,
                                                  const CompletionRequest* req = nullptr);

private:
    HttpBackendOptions options_;
};

} // namespace roleplan
