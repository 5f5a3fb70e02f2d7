#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redraft/state.hpp"

namespace redraft {

/// Stage tag carried with each generation request. Live providers ignore it;
/// the simulation backend dispatches on it.
enum class Role { plan, question, answer, report, draft, judge, revise, merge };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

struct GenerationRequest {
    std::string prompt;
    double temperature = 0.0;
    std::optional<int> top_k;
    std::optional<std::uint64_t> seed;
    int max_output_tokens = 8192;
    std::optional<Role> role;
    std::string template_id; // prompt template that produced `prompt`
};

/// Throws PreconditionError for an empty prompt, a non-finite or negative temperature,
/// non-positive top_k or max_output_tokens.
void validate(const GenerationRequest& request);

class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    /// Non-empty text or a BackendError subclass.
    virtual std::string generate(const GenerationRequest& request) = 0;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    /// At most k results in provider order; empty when nothing matches.
    virtual std::vector<SearchResult> search(std::string_view query, int k) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

/// Runs `call` until it succeeds, a non-retryable error occurs, or attempts run out.
/// `on_failure(attempt, error)` sees every failed attempt before the retry decision.
template <typename Call, typename OnFailure>
auto with_retry(const RetryPolicy& policy, const Sleeper& sleep, Call&& call, OnFailure&& on_failure)
    -> decltype(call());

/// Sampling parameters for one variant slot.
struct SamplingParams {
    double temperature = 0.0;
    std::optional<int> top_k;
    std::uint64_t seed = 0;
};

/// Deterministic schedule of (temperature, top_k, seed) indexed by variant number.
/// Slot 0 is greedy decoding, the parameters every plain unit-agent call uses.
/// Later slots cycle through warmer temperatures and narrower top_k; seeds are base_seed + slot.
class SamplingSchedule {
public:
    static constexpr std::string_view kDefaultId = "default";

    static SamplingSchedule by_id(std::string_view id);
    SamplingParams at(int slot, std::uint64_t base_seed) const;
    const std::string& id() const { return id_; }

private:
    std::string id_;
    std::vector<double> temperatures_;
    std::vector<std::optional<int>> top_ks_;
};

} // namespace redraft

#include "redraft/error.hpp"

namespace redraft {

template <typename Call, typename OnFailure>
auto with_retry(const RetryPolicy& policy, const Sleeper& sleep, Call&& call, OnFailure&& on_failure)
    -> decltype(call()) {
    auto backoff = policy.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return call();
        } catch (const BackendError& e) {
            on_failure(attempt, e);
            if (!e.retryable() || attempt >= policy.max_attempts) throw;
        }
        if (sleep) sleep(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
    }
}

} // namespace redraft
