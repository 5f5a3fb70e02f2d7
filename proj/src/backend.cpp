#include "redraft/backend.hpp"

#include <array>
#include <cmath>
#include <thread>

namespace redraft {

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 8> kRoleNames{{
    {Role::plan, "plan"},
    {Role::question, "question"},
    {Role::answer, "answer"},
    {Role::report, "report"},
    {Role::draft, "draft"},
    {Role::judge, "judge"},
    {Role::revise, "revise"},
    {Role::merge, "merge"},
}};

} // namespace

std::string_view to_string(Role role) {
    for (const auto& [r, name] : kRoleNames) {
        if (r == role) return name;
    }
    return "unknown";
}

std::optional<Role> role_from_string(std::string_view name) {
    for (const auto& [r, n] : kRoleNames) {
        if (n == name) return r;
    }
    return std::nullopt;
}

void validate(const GenerationRequest& request) {
    if (request.prompt.empty()) throw PreconditionError("generation request has an empty prompt");
    if (!std::isfinite(request.temperature) || request.temperature < 0.0) {
        throw PreconditionError("temperature must be finite and non-negative");
    }
    if (request.top_k && *request.top_k <= 0) throw PreconditionError("top_k must be positive");
    if (request.max_output_tokens <= 0) {
        throw PreconditionError("max_output_tokens must be positive");
    }
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

SamplingSchedule SamplingSchedule::by_id(std::string_view id) {
    SamplingSchedule s;
    s.id_ = std::string(id);
    if (id == kDefaultId) {
        s.temperatures_ = {0.0, 0.4, 0.6, 0.8, 1.0};
        s.top_ks_ = {std::nullopt, 40, 20, 64, 10};
    } else if (id == "greedy") {
        s.temperatures_ = {0.0};
        s.top_ks_ = {std::nullopt};
    } else {
        throw ConfigError("unknown sampling schedule '" + std::string(id) + "'");
    }
    return s;
}

SamplingParams SamplingSchedule::at(int slot, std::uint64_t base_seed) const {
    if (slot < 0) throw PreconditionError("sampling slot must be non-negative");
    SamplingParams p;
    p.seed = base_seed + static_cast<std::uint64_t>(slot);
    if (slot == 0) {
        p.temperature = temperatures_.front();
        p.top_k = top_ks_.front();
        return p;
    }
    // Slots past the table cycle through the non-greedy entries.
    auto warm = temperatures_.size() - 1;
    if (warm == 0) {
        p.temperature = temperatures_.front();
        p.top_k = top_ks_.front();
        return p;
    }
    auto idx = 1 + (static_cast<std::size_t>(slot) - 1) % warm;
    p.temperature = temperatures_[idx];
    p.top_k = top_ks_[idx];
    return p;
}

} // namespace redraft
