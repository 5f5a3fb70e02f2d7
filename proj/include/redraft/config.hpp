#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace redraft {

enum class Mode { backbone, evolution, denoising };
enum class TaskClass { long_form, short_form };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);
std::string_view to_string(TaskClass task);
TaskClass task_class_from_string(std::string_view name);

struct BackboneConfig {
    int max_search_iterations = 20;
    int search_k = 10;
    /// "exact" checks plan headings against asked questions; "judge" asks the judge backend.
    /// Empty picks exact for simulation and judge for live backends.
    std::string coverage_check;
    /// Stage name to prompt template id.
    std::map<std::string, std::string> templates{
        {"plan", "plan"},     {"question", "question"}, {"question_with_draft", "question_with_draft"},
        {"answer", "answer"}, {"draft", "draft"},       {"revise_draft", "revise_draft"},
        {"report", "report"},
    };

    const std::string& template_for(const std::string& stage) const;
};

/// Initial-state counts (n) and self-evolving steps (s) per stage.
struct EvolutionConfig {
    int n_p = 1;
    int n_q = 5;
    int n_a = 3;
    int n_r = 1;
    int s_p = 1;
    int s_q = 0;
    int s_a = 0;
    int s_r = 1;
    std::string sampling_schedule = "default";

    static EvolutionConfig defaults(TaskClass task);
    bool operator==(const EvolutionConfig&) const = default;
};

struct DenoiseConfig {
    int max_steps = 20;
    std::string exit_predicate = "coverage";
    /// Ablation switch: without it Stage 2a never sees the draft.
    bool draft_conditioning = true;
    /// Apply per-stage self-evolution inside the denoising pipeline.
    bool self_evolution = true;
};

struct EndpointConfig {
    std::string base_url;
    std::string model;
    std::string api_key_env;
    int timeout_seconds = 120;
    int min_interval_ms = 0;
};

struct BackendConfig {
    std::string kind = "simulation"; // simulation | live
    std::filesystem::path corpus;
    EndpointConfig generation;
    EndpointConfig search;
    std::optional<EndpointConfig> judge; // defaults to the generation endpoint
};

struct RunConfig {
    Mode mode = Mode::denoising;
    TaskClass task_class = TaskClass::long_form;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::string query;
    std::filesystem::path prompts_dir;
    BackendConfig backend;
    BackboneConfig backbone;
    EvolutionConfig evolution;
    DenoiseConfig denoise;

    /// Parses one JSON document. Unknown keys and invalid values throw ConfigError.
    /// Relative paths resolve against `base_dir`.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Throws ConfigError when an invariant fails.
    void validate() const;

    /// Stable identifier of the settings that shape a run (output location excluded).
    std::string identifier() const;

    bool simulation() const { return backend.kind == "simulation"; }
};

} // namespace redraft
