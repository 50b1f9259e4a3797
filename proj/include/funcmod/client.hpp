#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "funcmod/extract.hpp"

namespace funcmod {

struct ClientConfig {
    std::string endpoint_url = "http://localhost:8000"; // scheme://host[:port][/base]
    std::string model_name = "gpt-4";
    double temperature = 0.0;
    int max_tokens = 1024;
    double timeout_seconds = 60.0;
    int max_retries = 3;          // retries after the first attempt
    int concurrency_limit = 4;
    std::string api_key_env = "FUNCMOD_API_KEY";

    void validate() const;
};

struct LlmResponse {
    std::string raw_text;       // generated sequence, verbatim
    int prompt_tokens = 0;
    int completion_tokens = 0;
    double latency_ms = 0.0;
    int attempts = 1;
};

// One chat completion against an HTTP JSON endpoint. Transient failures
// (429, 5xx, transport errors) retry with exponential backoff up to
// max_retries; auth and malformed-body errors do not retry.
LlmResponse complete(const ClientConfig& config, const std::string& prompt_text);

using CompleteFn = std::function<LlmResponse(const std::string&)>;

CompleteFn make_live_backend(const ClientConfig& config);

// Append-only JSON-lines log; one record per request with the prompt hash,
// raw response and extraction result, so runs can be replayed offline.
class TranscriptLog {
public:
    explicit TranscriptLog(const std::string& path);
    ~TranscriptLog();

    void record(const std::string& prompt, const LlmResponse& response,
                const Prediction& prediction, const std::string& error = "");
    const std::string& path() const { return path_; }

    struct Entry {
        std::string prompt_hash;
        std::string raw_text;
        Prediction prediction;
        std::string error;
    };
    static std::vector<Entry> replay(const std::string& path);

private:
    std::string path_;
    std::mutex mutex_;
    std::unique_ptr<std::ofstream> out_;
};

std::string prompt_hash(const std::string& prompt);

struct BatchItem {
    std::string prompt;
    ExpectKind kind = ExpectKind::Real;
    std::vector<std::string> labels;
};

struct BatchOutcome {
    std::vector<Prediction> predictions;  // input order
    std::vector<std::string> item_errors; // aligned; empty string = no error
    size_t n_failures() const;
};

// Runs the batch with up to `parallelism` in-flight requests; per-item
// failures are isolated and recorded. Results come back in input order.
BatchOutcome batch_predict(const std::vector<BatchItem>& items, const CompleteFn& backend,
                           size_t parallelism, TranscriptLog* log = nullptr);

} // namespace funcmod
