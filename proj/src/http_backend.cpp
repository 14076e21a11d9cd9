#include "roleplan/digest.hpp"
#include "roleplan/errors.hpp"
#include "roleplan/model_backend.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>

namespace roleplan {

using json = nlohmann::json;

namespace {

std::string mime_type_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".webp") return "image/webp";
    if (ext == ".gif") return "image/gif";
    return "image/png";
}

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw WireError("endpoint URL lacks a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

} // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {}

json HttpBackend::build_request_body(const ModelSpec& model, const CompletionRequest& req) {
    json messages = json::array();
    if (!req.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", req.system_prompt}});

    if (req.images.empty()) {
        messages.push_back({{"role", "user"}, {"content", req.user_message}});
    } else {
        json parts = json::array();
        parts.push_back({{"type", "text"}, {"text", req.user_message}});
        for (const auto& image : req.images) {
            const std::string url = "data:" + mime_type_for(image) + ";base64," + base64_encode(read_binary_file(image));
            parts.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
        }
        messages.push_back({{"role", "user"}, {"content", parts}});
    }

    json body = {
        {"model", model.id},
        {"messages", messages},
        {"temperature", req.temperature},
        {"max_tokens", model.max_output_tokens},
        {"stream", false},
    };
    if (req.seed) body["seed"] = *req.seed;
    return body;
}

CompletionResponse HttpBackend::parse_response_body(const ModelSpec& model, std::string_view body,
                                                    const CompletionRequest* req) {
    CompletionResponse out;
    const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) return out; // malformed: empty text, caller retries

    std::optional<std::int64_t> prompt_tokens;
    std::optional<std::int64_t> completion_tokens;
    if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
        if (auto p = usage->find("prompt_tokens"); p != usage->end() && p->is_number_integer()) prompt_tokens = p->get<std::int64_t>();
        if (auto c = usage->find("completion_tokens"); c != usage->end() && c->is_number_integer()) completion_tokens = c->get<std::int64_t>();
    }

    if (auto choices = doc.find("choices"); choices != doc.end() && choices->is_array() && !choices->empty()) {
        const auto& first = choices->front();
        if (auto msg = first.find("message"); msg != first.end() && msg->is_object()) {
            if (auto content = msg->find("content"); content != msg->end() && content->is_string()) {
                out.text = content->get<std::string>();
            }
        } else if (auto text = first.find("text"); text != first.end() && text->is_string()) {
            out.text = text->get<std::string>();
        }
    }

    std::int64_t prompt_estimate = 0;
    if (req != nullptr) prompt_estimate = count_tokens(req->system_prompt + req->user_message, model);
    out.tokens_in = prompt_tokens.value_or(prompt_estimate);
    out.tokens_out = resolve_token_count(completion_tokens, out.text, model);
    out.tokens_estimated = !prompt_tokens || !completion_tokens;
    return out;
}

CompletionResponse HttpBackend::send(const ModelSpec& model, const CompletionRequest& req) {
    const std::string base = model.endpoint.value_or(options_.base_url);
    if (base.empty()) throw WireError("no endpoint configured for model '" + model.id + "'");
    const SplitUrl url = split_url(base);

    const json body = build_request_body(model, req);

    httplib::Client client(url.origin);
    const auto sec = static_cast<time_t>(options_.timeout_s);
    const auto usec = static_cast<time_t>((options_.timeout_s - static_cast<double>(sec)) * 1e6);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    httplib::Headers headers;
    if (!options_.api_key_env.empty()) {
        if (const char* key = std::getenv(options_.api_key_env.c_str()); key != nullptr && *key != '\0') {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(url.prefix + "/chat/completions", headers, body.dump(), "application/json");
    const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!result) {
        throw WireError("request to " + base + " failed: " + httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
        throw WireError("request to " + base + " returned HTTP " + std::to_string(result->status) + ": " +
                        result->body.substr(0, 200));
    }

    CompletionResponse out = parse_response_body(model, result->body, &req);
    out.latency_s = latency;
    return out;
}

} // namespace roleplan
