#include "nluforge/llm.hpp"

#include <ctime>
#include <exception>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "nluforge/digest.hpp"
#include "nluforge/error.hpp"

namespace nluforge {

std::string_view to_string(LlmMode mode) {
    switch (mode) {
        case LlmMode::Live: return "live";
        case LlmMode::Record: return "record";
        case LlmMode::Replay: return "replay";
    }
    return "?";
}

std::optional<LlmMode> parse_llm_mode(std::string_view text) {
    if (text == "live") return LlmMode::Live;
    if (text == "record") return LlmMode::Record;
    if (text == "replay") return LlmMode::Replay;
    return std::nullopt;
}

namespace {

class HttpTransport : public Transport {
  public:
    explicit HttpTransport(const std::string& base_url) {
        // Split "scheme://host[:port]/prefix" into the client origin and path prefix.
        auto scheme_end = base_url.find("://");
        auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        auto path_start = base_url.find('/', host_start);
        origin_ = base_url.substr(0, path_start);
        prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }

    HttpReply post_json(const std::string& path, const std::string& body,
                        const std::vector<std::pair<std::string, std::string>>& headers) override {
        httplib::Client client(origin_);
        client.set_connection_timeout(30);
        client.set_read_timeout(300);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto res = client.Post(prefix_ + path, h, body, "application/json");
        if (!res) throw TransportFailure("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

  private:
    std::string origin_;
    std::string prefix_;
};

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool transient_status(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url) {
    return std::make_unique<HttpTransport>(base_url);
}

std::string cache_key(const std::string& model, const std::string& prompt, double temperature, double top_p,
                      int max_tokens) {
    return sha256_hex(dump_compact(ojson::array({model, prompt, temperature, top_p, max_tokens})));
}

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // a missing cache is an empty cache
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto v = ojson::parse(line);
            responses_.emplace(v.at("key").get<std::string>(), v.at("response").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedRecord,
                        path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::optional<std::string> ResponseCache::find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = responses_.find(key);
    if (it == responses_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::append(CacheEntry entry) {
    std::lock_guard lock(mu_);
    if (!responses_.emplace(entry.key, entry.response).second) return;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + path_.string());
    out << dump_compact(ojson{{"key", entry.key},
                              {"request", entry.request},
                              {"response", entry.response},
                              {"created_at", entry.created_at}})
        << '\n';
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mu_);
    return responses_.size();
}

LlmClient::LlmClient(LlmSettings settings, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : settings_(std::move(settings)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      cache_(settings_.cache_path) {
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (settings_.max_in_flight == 0) settings_.max_in_flight = 1;
    if (settings_.max_attempts < 1) settings_.max_attempts = 1;
}

ojson LlmClient::request_body(const std::string& prompt) const {
    return ojson{{"model", settings_.model},
                 {"messages", ojson::array({ojson{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", settings_.temperature},
                 {"top_p", settings_.top_p},
                 {"max_tokens", settings_.max_tokens}};
}

std::string LlmClient::complete(const std::string& prompt) {
    const std::string key =
        cache_key(settings_.model, prompt, settings_.temperature, settings_.top_p, settings_.max_tokens);
    if (settings_.mode != LlmMode::Live) {
        if (auto hit = cache_.find(key)) return *hit;
        if (settings_.mode == LlmMode::Replay) throw Error(ErrorCode::CacheMiss, "no cached response for key " + key);
    }
    const ojson request = request_body(prompt);
    std::string response = call_endpoint(request);
    if (settings_.mode == LlmMode::Record) cache_.append({key, request, response, utc_now()});
    return response;
}

std::string LlmClient::call_endpoint(const ojson& request) {
    if (!transport_) throw Error(ErrorCode::LlmUnavailable, "no transport configured");
    {
        std::unique_lock lock(slots_mu_);
        slots_cv_.wait(lock, [&] { return in_flight_ < settings_.max_in_flight; });
        ++in_flight_;
    }
    struct Release {
        LlmClient* self;
        ~Release() {
            {
                std::lock_guard lock(self->slots_mu_);
                --self->in_flight_;
            }
            self->slots_cv_.notify_one();
        }
    } release{this};

    std::vector<std::pair<std::string, std::string>> headers;
    if (!settings_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + settings_.api_key);
    const std::string body = dump_compact(request);

    std::string last_error;
    auto delay = settings_.initial_backoff;
    for (int attempt = 1; attempt <= settings_.max_attempts; ++attempt) {
        if (attempt > 1) {
            spdlog::warn("llm attempt {} failed ({}), retrying in {} ms", attempt - 1, last_error, delay.count());
            sleeper_(delay);
            delay *= 2;
        }
        HttpReply reply;
        try {
            ++network_calls_;
            reply = transport_->post_json("/chat/completions", body, headers);
        } catch (const TransportFailure& e) {
            last_error = e.what();
            continue;
        }
        if (reply.status != 200) {
            last_error = "HTTP " + std::to_string(reply.status);
            if (transient_status(reply.status)) continue;
            throw Error(ErrorCode::LlmUnavailable, last_error + ": " + reply.body.substr(0, 200));
        }
        ojson parsed;
        try {
            parsed = ojson::parse(reply.body);
            const auto& choice = parsed.at("choices").at(0);
            if (choice.value("finish_reason", "") == "length") {
                throw Error(ErrorCode::ResponseTooLong,
                            "response truncated at max_tokens=" + std::to_string(settings_.max_tokens));
            }
            return choice.at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("bad response body: ") + e.what();
        }
    }
    throw Error(ErrorCode::LlmUnavailable,
                "gave up after " + std::to_string(settings_.max_attempts) + " attempts: " + last_error);
}

std::vector<std::string> LlmClient::complete_all(const std::vector<std::string>& prompts) {
    std::vector<std::string> out(prompts.size());
    std::vector<std::exception_ptr> errors(prompts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
            try {
                out[i] = complete(prompts[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min(settings_.max_in_flight, prompts.size());
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace nluforge
