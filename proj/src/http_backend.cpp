#include "redraft/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <curl/curl.h>

#include "redraft/error.hpp"

namespace redraft {

using nlohmann::json;

namespace {

void ensure_curl() {
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

std::size_t collect(char* data, std::size_t size, std::size_t n, void* out) {
    static_cast<std::string*>(out)->append(data, size * n);
    return size * n;
}

std::string endpoint_url(const EndpointConfig& e, const std::string& suffix) {
    auto base = e.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base + suffix;
}

std::map<std::string, std::string> auth_headers(const std::string& key) {
    std::map<std::string, std::string> h{{"Content-Type", "application/json"}};
    if (!key.empty()) h["Authorization"] = "Bearer " + key;
    return h;
}

json redacted(const std::map<std::string, std::string>& headers) {
    json out = json::object();
    for (const auto& [k, v] : headers) out[k] = k == "Authorization" ? "Bearer [REDACTED]" : v;
    return out;
}

json body_or_text(const std::string& body) {
    auto parsed = json::parse(body, nullptr, false);
    return parsed.is_discarded() ? json(body) : parsed;
}

struct Exchange {
    HttpResponse response;
    std::int64_t duration_ms = 0;
};

Exchange exchange(const std::string& url, const std::map<std::string, std::string>& headers, const json& payload,
                  int timeout, RateLimiter& limiter, const ExchangeLog& log, const char* kind) {
    limiter.acquire();
    auto start = std::chrono::steady_clock::now();
    Exchange ex;
    std::string error;
    try {
        ex.response = http_post_json(url, headers, payload.dump(), timeout);
    } catch (const TransportError& e) {
        error = e.what();
    }
    ex.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    if (log) {
        json rec{{"kind", "http"},
                 {"endpoint", kind},
                 {"request", {{"url", url}, {"headers", redacted(headers)}, {"body", payload}}},
                 {"duration_ms", ex.duration_ms}};
        if (error.empty()) {
            rec["response"] = {{"status", ex.response.status}, {"body", body_or_text(ex.response.body)}};
        } else {
            rec["transport_error"] = error;
        }
        log(std::move(rec));
    }
    if (!error.empty()) throw TransportError(error, true);
    raise_for_status(ex.response, url);
    return ex;
}

} // namespace

HttpResponse http_post_json(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body, int timeout_seconds) {
    ensure_curl();
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw TransportError("curl_easy_init failed", true);
    curl_slist* list = nullptr;
    for (const auto& [k, v] : headers) list = curl_slist_append(list, (k + ": " + v).c_str());
    std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_guard(list, curl_slist_free_all);
    HttpResponse out;
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_HTTPHEADER, list);
    curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDS, body.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDSIZE, static_cast<long>(body.size()));
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, static_cast<long>(timeout_seconds));
    curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, collect);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &out.body);
    auto rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) throw TransportError(std::string("request to ") + url + " failed: " + curl_easy_strerror(rc));
    curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &out.status);
    return out;
}

void raise_for_status(const HttpResponse& r, const std::string& endpoint) {
    if (r.status >= 200 && r.status < 300) return;
    auto msg = endpoint + " returned HTTP " + std::to_string(r.status);
    if (r.status == 429) throw RateLimitError(msg);
    throw TransportError(msg, r.status >= 500);
}

void RateLimiter::acquire() {
    if (min_interval_.count() <= 0) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + min_interval_;
    }
    std::this_thread::sleep_until(slot);
}

std::string resolve_api_key(const EndpointConfig& e) {
    if (e.api_key_env.empty()) return {};
    const char* v = std::getenv(e.api_key_env.c_str());
    if (!v || !*v) throw ConfigError("environment variable " + e.api_key_env + " holding the API key is not set");
    return v;
}

HttpGenerator::HttpGenerator(EndpointConfig endpoint)
    : endpoint_(std::move(endpoint)),
      api_key_(resolve_api_key(endpoint_)),
      limiter_(std::chrono::milliseconds(endpoint_.min_interval_ms)) {}

std::string HttpGenerator::generate(const GenerationRequest& request) {
    validate(request);
    json payload{{"model", endpoint_.model},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_output_tokens}};
    if (request.top_k) payload["top_k"] = *request.top_k;
    if (request.seed) payload["seed"] = *request.seed;
    auto ex = exchange(endpoint_url(endpoint_, "/chat/completions"), auth_headers(api_key_), payload,
                       endpoint_.timeout_seconds, limiter_, log_, "generation");
    auto body = json::parse(ex.response.body, nullptr, false);
    if (body.is_discarded()) throw MalformedResponseError("generation response is not JSON");
    try {
        auto content = body.at("choices").at(0).at("message").at("content").get<std::string>();
        if (content.empty()) throw MalformedResponseError("generation response has empty content");
        return content;
    } catch (const json::exception&) {
        throw MalformedResponseError("generation response lacks choices[0].message.content");
    }
}

HttpSearch::HttpSearch(EndpointConfig endpoint)
    : endpoint_(std::move(endpoint)),
      api_key_(resolve_api_key(endpoint_)),
      limiter_(std::chrono::milliseconds(endpoint_.min_interval_ms)) {}

std::vector<SearchResult> HttpSearch::search(std::string_view query, int k) {
    if (k < 0) throw PreconditionError("search k must be non-negative");
    if (k == 0) return {};
    json payload{{"query", std::string(query)}, {"k", k}};
    auto ex = exchange(endpoint_url(endpoint_, "/search"), auth_headers(api_key_), payload, endpoint_.timeout_seconds,
                       limiter_, log_, "search");
    auto body = json::parse(ex.response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("results") || !body["results"].is_array()) {
        throw MalformedResponseError("search response lacks a results array");
    }
    std::vector<SearchResult> out;
    try {
        for (const auto& r : body["results"]) {
            SearchResult s;
            s.doc_id = r.at("id").get<std::string>();
            s.title = r.value("title", "");
            s.snippet = r.value("snippet", "");
            s.locator = r.value("url", "");
            bool dup = false;
            for (const auto& o : out) dup = dup || o.doc_id == s.doc_id;
            if (!dup) out.push_back(std::move(s));
            if (static_cast<int>(out.size()) == k) break;
        }
    } catch (const json::exception& e) {
        throw MalformedResponseError(std::string("search result malformed: ") + e.what());
    }
    return out;
}

} // namespace redraft
