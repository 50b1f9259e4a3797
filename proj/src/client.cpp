#include "funcmod/client.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

using nlohmann::json;

void ClientConfig::validate() const {
    if (temperature < 0) throw InvalidInput("temperature must be >= 0");
    if (concurrency_limit < 1) throw InvalidInput("concurrency_limit must be >= 1");
    if (max_retries < 0) throw InvalidInput("max_retries must be >= 0");
}

namespace {

struct ParsedUrl {
    std::string base; // scheme://host:port
    std::string path; // defaults to the chat-completions route
};

ParsedUrl parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidInput("endpoint_url needs a scheme");
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/v1/chat/completions";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

} // namespace

LlmResponse complete(const ClientConfig& config, const std::string& prompt_text) {
    config.validate();
    ParsedUrl url = parse_endpoint(config.endpoint_url);

    json body;
    body["model"] = config.model_name;
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_tokens;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt_text}}});
    std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto start = std::chrono::steady_clock::now();
    std::string last_error;
    bool rate_limited = false;
    int attempts = 0;

    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            double backoff = std::min(4.0, 0.25 * static_cast<double>(1 << (attempt - 1)));
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        }
        ++attempts;

        httplib::Client client(url.base);
        client.set_connection_timeout(std::chrono::duration<double>(config.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(config.timeout_seconds));

        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw AuthFailure("endpoint rejected credentials (status " +
                              std::to_string(res->status) + ")");
        if (transient_status(res->status)) {
            rate_limited = res->status == 429;
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw MalformedResponse("unexpected status " + std::to_string(res->status) + ": " +
                                    res->body);
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::exception& e) {
            throw MalformedResponse(std::string("response is not JSON: ") + e.what());
        }
        if (!parsed.contains("choices") || parsed["choices"].empty())
            throw MalformedResponse("response has no choices");
        const auto& choice = parsed["choices"][0];
        LlmResponse out;
        try {
            out.raw_text = choice.at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw MalformedResponse("choice has no message content");
        }
        if (parsed.contains("usage")) {
            out.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            out.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        }
        out.latency_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        out.attempts = attempts;
        return out;
    }

    if (rate_limited)
        throw RateLimitedError("rate limited after " + std::to_string(attempts) + " attempts");
    throw TimeoutError("endpoint unreachable after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

CompleteFn make_live_backend(const ClientConfig& config) {
    return [config](const std::string& prompt) { return complete(config, prompt); };
}

// ---------------------------------------------------------------------------
// Transcripts

std::string prompt_hash(const std::string& prompt) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(prompt)));
    return std::string(buf);
}

TranscriptLog::TranscriptLog(const std::string& path) : path_(path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    out_ = std::make_unique<std::ofstream>(path, std::ios::app);
    if (!*out_) throw IoError("cannot open transcript log " + path);
}

TranscriptLog::~TranscriptLog() = default;

namespace {

json prediction_to_json(const Prediction& p) {
    json j;
    j["ok"] = p.ok;
    j["kind"] = p.kind == ExpectKind::ClassLabel ? "class" : "real";
    if (p.ok) {
        if (p.kind == ExpectKind::ClassLabel) j["label"] = p.label;
        else j["value"] = p.value;
    } else {
        j["failure"] = p.failure;
    }
    return j;
}

Prediction prediction_from_json(const json& j) {
    Prediction p;
    p.ok = j.value("ok", false);
    p.kind = j.value("kind", "real") == "class" ? ExpectKind::ClassLabel : ExpectKind::Real;
    p.label = j.value("label", "");
    p.value = j.value("value", 0.0);
    p.failure = j.value("failure", "");
    return p;
}

} // namespace

void TranscriptLog::record(const std::string& prompt, const LlmResponse& response,
                           const Prediction& prediction, const std::string& error) {
    json j;
    j["prompt_hash"] = prompt_hash(prompt);
    j["raw_text"] = response.raw_text;
    j["attempts"] = response.attempts;
    j["usage"] = {{"prompt_tokens", response.prompt_tokens},
                  {"completion_tokens", response.completion_tokens}};
    j["latency_ms"] = response.latency_ms;
    j["prediction"] = prediction_to_json(prediction);
    if (!error.empty()) j["error"] = error;
    std::lock_guard<std::mutex> lock(mutex_);
    *out_ << j.dump() << "\n";
    out_->flush();
}

std::vector<TranscriptLog::Entry> TranscriptLog::replay(const std::string& path) {
    std::vector<Entry> entries;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open transcript log " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        Entry e;
        e.prompt_hash = j.value("prompt_hash", "");
        e.raw_text = j.value("raw_text", "");
        if (j.contains("prediction")) e.prediction = prediction_from_json(j["prediction"]);
        e.error = j.value("error", "");
        entries.push_back(std::move(e));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Batching

size_t BatchOutcome::n_failures() const {
    size_t n = 0;
    for (size_t i = 0; i < predictions.size(); ++i)
        if (!predictions[i].ok || !item_errors[i].empty()) ++n;
    return n;
}

BatchOutcome batch_predict(const std::vector<BatchItem>& items, const CompleteFn& backend,
                           size_t parallelism, TranscriptLog* log) {
    if (parallelism == 0) throw InvalidInput("parallelism must be >= 1");
    BatchOutcome out;
    out.predictions.resize(items.size());
    out.item_errors.resize(items.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            const BatchItem& item = items[i];
            LlmResponse response;
            Prediction pred;
            std::string error;
            try {
                response = backend(item.prompt);
                pred = extract(response.raw_text, item.kind, item.labels);
            } catch (const Error& e) {
                error = e.what();
                pred.ok = false;
                pred.kind = item.kind;
                pred.failure = error;
            }
            out.predictions[i] = pred;
            out.item_errors[i] = error;
            if (log) log->record(item.prompt, response, pred, error);
        }
    };

    size_t n_threads = std::min(parallelism, items.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return out;
}

} // namespace funcmod
