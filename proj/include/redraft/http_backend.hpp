#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "redraft/backend.hpp"
#include "redraft/config.hpp"

// Remote providers: an OpenAI-compatible chat completion endpoint and a JSON search endpoint.
namespace redraft {

struct HttpResponse {
    long status = 0;
    std::string body;
};

/// Blocking JSON POST over libcurl. Transport failures throw TransportError (retryable).
HttpResponse http_post_json(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body, int timeout_seconds);

/// Maps an HTTP status to the error taxonomy: 429 rate limit, 5xx retryable transport,
/// other non-2xx non-retryable transport. Returns normally for 2xx.
void raise_for_status(const HttpResponse& response, const std::string& endpoint);

/// Enforces a minimum spacing between request starts; shared by every caller of one backend.
class RateLimiter {
public:
    explicit RateLimiter(std::chrono::milliseconds min_interval) : min_interval_(min_interval) {}
    void acquire();

private:
    std::mutex mutex_;
    std::chrono::milliseconds min_interval_;
    std::chrono::steady_clock::time_point next_{};
};

/// Receives one record per HTTP exchange with credentials redacted.
using ExchangeLog = std::function<void(nlohmann::json)>;

/// Reads the credential named by `api_key_env`. Empty name means no credential;
/// a named but unset variable throws ConfigError.
std::string resolve_api_key(const EndpointConfig& endpoint);

class HttpGenerator final : public TextGenerator {
public:
    explicit HttpGenerator(EndpointConfig endpoint);
    std::string generate(const GenerationRequest& request) override;
    void set_log(ExchangeLog log) { log_ = std::move(log); }

private:
    EndpointConfig endpoint_;
    std::string api_key_;
    RateLimiter limiter_;
    ExchangeLog log_;
};

/// POST {base_url}/search with {"query", "k"}; expects {"results": [{"id", "title", "snippet", "url"}]}.
class HttpSearch final : public SearchProvider {
public:
    explicit HttpSearch(EndpointConfig endpoint);
    std::vector<SearchResult> search(std::string_view query, int k) override;
    void set_log(ExchangeLog log) { log_ = std::move(log); }

private:
    EndpointConfig endpoint_;
    std::string api_key_;
    RateLimiter limiter_;
    ExchangeLog log_;
};

} // namespace redraft
