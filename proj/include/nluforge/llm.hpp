#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nluforge/codec.hpp"

namespace nluforge {

enum class LlmMode { Live, Record, Replay };

std::string_view to_string(LlmMode mode);
std::optional<LlmMode> parse_llm_mode(std::string_view text);

struct LlmSettings {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    double temperature = 0.2;
    double top_p = 0.95;
    int max_tokens = 1024;
    LlmMode mode = LlmMode::Replay;
    std::filesystem::path cache_path;
    std::size_t max_in_flight = 4;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    /// Read from the environment by the CLI; never written to disk.
    std::string api_key;
};

struct HttpReply {
    int status = 0;
    std::string body;
};

/// Network failure below HTTP (connect, TLS, timeout).
class TransportFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Transport {
  public:
    virtual ~Transport() = default;
    virtual HttpReply post_json(const std::string& path, const std::string& body,
                                const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// HTTPS (or plain HTTP) transport for an OpenAI-compatible base URL such as
/// "https://api.openai.com/v1".
std::unique_ptr<Transport> make_http_transport(const std::string& base_url);

/// Digest of every request parameter that changes the response.
std::string cache_key(const std::string& model, const std::string& prompt, double temperature, double top_p,
                      int max_tokens);

struct CacheEntry {
    std::string key;
    ojson request;
    std::string response;
    std::string created_at;
};

/// Append-only JSONL response cache. Appends are serialized.
class ResponseCache {
  public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path path);

    std::optional<std::string> find(const std::string& key) const;
    void append(CacheEntry entry);
    std::size_t size() const;

  private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> responses_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class LlmClient {
  public:
    /// `transport` may be null in replay mode.
    LlmClient(LlmSettings settings, std::shared_ptr<Transport> transport, Sleeper sleeper = {});

    /// Throws LlmUnavailable, CacheMiss, ResponseTooLong.
    std::string complete(const std::string& prompt);

    /// Completes every prompt with at most max_in_flight concurrent requests.
    /// Results keep the input order; the first failure (by index) is rethrown.
    std::vector<std::string> complete_all(const std::vector<std::string>& prompts);

    const LlmSettings& settings() const { return settings_; }
    std::size_t network_calls() const { return network_calls_.load(); }
    ResponseCache& cache() { return cache_; }

  private:
    std::string call_endpoint(const ojson& request);
    ojson request_body(const std::string& prompt) const;

    LlmSettings settings_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleeper_;
    ResponseCache cache_;
    std::atomic<std::size_t> network_calls_{0};

    std::mutex slots_mu_;
    std::condition_variable slots_cv_;
    std::size_t in_flight_ = 0;
};

}  // namespace nluforge
