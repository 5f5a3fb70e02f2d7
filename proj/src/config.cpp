#include "redraft/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "redraft/backend.hpp"
#include "redraft/error.hpp"
#include "redraft/text.hpp"

namespace redraft {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown configuration key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read(const json& j, const std::string& key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("configuration key '" + where + key + "' has the wrong type");
    }
}

EndpointConfig endpoint_from_json(const json& j, const std::string& where) {
    check_keys(j, {"base_url", "model", "api_key_env", "timeout_seconds", "min_interval_ms"}, where);
    EndpointConfig e;
    read(j, "base_url", e.base_url, where + ".");
    read(j, "model", e.model, where + ".");
    read(j, "api_key_env", e.api_key_env, where + ".");
    read(j, "timeout_seconds", e.timeout_seconds, where + ".");
    read(j, "min_interval_ms", e.min_interval_ms, where + ".");
    return e;
}

json endpoint_to_json(const EndpointConfig& e) {
    return json{{"base_url", e.base_url},
                {"model", e.model},
                {"api_key_env", e.api_key_env},
                {"timeout_seconds", e.timeout_seconds},
                {"min_interval_ms", e.min_interval_ms}};
}

void require_positive(int v, const std::string& name) {
    if (v < 1) throw ConfigError(name + " must be at least 1");
}

void require_non_negative(int v, const std::string& name) {
    if (v < 0) throw ConfigError(name + " must be non-negative");
}

} // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::backbone: return "backbone";
    case Mode::evolution: return "evolution";
    case Mode::denoising: return "denoising";
    }
    return "backbone";
}

Mode mode_from_string(std::string_view name) {
    if (name == "backbone") return Mode::backbone;
    if (name == "evolution") return Mode::evolution;
    if (name == "denoising") return Mode::denoising;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected backbone, evolution or denoising)");
}

std::string_view to_string(TaskClass task) {
    return task == TaskClass::long_form ? "long_form" : "short_form";
}

TaskClass task_class_from_string(std::string_view name) {
    if (name == "long_form") return TaskClass::long_form;
    if (name == "short_form") return TaskClass::short_form;
    throw ConfigError("unknown task_class '" + std::string(name) + "' (expected long_form or short_form)");
}

const std::string& BackboneConfig::template_for(const std::string& stage) const {
    auto it = templates.find(stage);
    if (it == templates.end()) throw ConfigError("no prompt template configured for stage '" + stage + "'");
    return it->second;
}

EvolutionConfig EvolutionConfig::defaults(TaskClass task) {
    EvolutionConfig c;
    if (task == TaskClass::short_form) {
        c.n_r = 5;
        c.s_r = 0;
    }
    return c;
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j,
               {"mode", "task_class", "seed", "output_dir", "query", "prompts_dir", "backend", "backbone",
                "evolution", "denoise"},
               "");
    RunConfig c;
    std::string s;
    if (j.contains("mode")) {
        read(j, "mode", s, "");
        c.mode = mode_from_string(s);
    }
    if (j.contains("task_class")) {
        read(j, "task_class", s, "");
        c.task_class = task_class_from_string(s);
    }
    c.evolution = EvolutionConfig::defaults(c.task_class);
    read(j, "seed", c.seed, "");
    read(j, "query", c.query, "");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    if (j.contains("output_dir")) {
        read(j, "output_dir", s, "");
        c.output_dir = resolve(s);
    }
    if (j.contains("prompts_dir")) {
        read(j, "prompts_dir", s, "");
        c.prompts_dir = resolve(s);
    }
    if (j.contains("backend")) {
        const auto& b = j["backend"];
        check_keys(b, {"kind", "corpus", "generation", "search", "judge"}, "backend");
        read(b, "kind", c.backend.kind, "backend.");
        if (b.contains("corpus")) {
            read(b, "corpus", s, "backend.");
            c.backend.corpus = resolve(s);
        }
        if (b.contains("generation")) c.backend.generation = endpoint_from_json(b["generation"], "backend.generation");
        if (b.contains("search")) c.backend.search = endpoint_from_json(b["search"], "backend.search");
        if (b.contains("judge")) c.backend.judge = endpoint_from_json(b["judge"], "backend.judge");
    }
    if (j.contains("backbone")) {
        const auto& b = j["backbone"];
        check_keys(b, {"max_search_iterations", "search_k", "coverage_check", "templates"}, "backbone");
        read(b, "max_search_iterations", c.backbone.max_search_iterations, "backbone.");
        read(b, "search_k", c.backbone.search_k, "backbone.");
        read(b, "coverage_check", c.backbone.coverage_check, "backbone.");
        if (b.contains("templates")) {
            const auto& t = b["templates"];
            std::set<std::string> stages;
            for (const auto& [stage, _] : c.backbone.templates) stages.insert(stage);
            check_keys(t, stages, "backbone.templates");
            for (const auto& [stage, id] : t.items()) {
                if (!id.is_string()) throw ConfigError("backbone.templates." + stage + " must be a string");
                c.backbone.templates[stage] = id.get<std::string>();
            }
        }
    }
    if (j.contains("evolution")) {
        const auto& e = j["evolution"];
        check_keys(e, {"n_p", "n_q", "n_a", "n_r", "s_p", "s_q", "s_a", "s_r", "sampling_schedule"}, "evolution");
        read(e, "n_p", c.evolution.n_p, "evolution.");
        read(e, "n_q", c.evolution.n_q, "evolution.");
        read(e, "n_a", c.evolution.n_a, "evolution.");
        read(e, "n_r", c.evolution.n_r, "evolution.");
        read(e, "s_p", c.evolution.s_p, "evolution.");
        read(e, "s_q", c.evolution.s_q, "evolution.");
        read(e, "s_a", c.evolution.s_a, "evolution.");
        read(e, "s_r", c.evolution.s_r, "evolution.");
        read(e, "sampling_schedule", c.evolution.sampling_schedule, "evolution.");
    }
    if (j.contains("denoise")) {
        const auto& d = j["denoise"];
        check_keys(d, {"max_steps", "exit_predicate", "draft_conditioning", "self_evolution"}, "denoise");
        read(d, "max_steps", c.denoise.max_steps, "denoise.");
        read(d, "exit_predicate", c.denoise.exit_predicate, "denoise.");
        read(d, "draft_conditioning", c.denoise.draft_conditioning, "denoise.");
        read(d, "self_evolution", c.denoise.self_evolution, "denoise.");
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("configuration file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j, path.parent_path());
}

json RunConfig::to_json() const {
    json templates = json::object();
    for (const auto& [stage, id] : backbone.templates) templates[stage] = id;
    json backend_json{{"kind", backend.kind},
                      {"corpus", backend.corpus.string()},
                      {"generation", endpoint_to_json(backend.generation)},
                      {"search", endpoint_to_json(backend.search)}};
    if (backend.judge) backend_json["judge"] = endpoint_to_json(*backend.judge);
    return json{{"mode", to_string(mode)},
                {"task_class", to_string(task_class)},
                {"seed", seed},
                {"output_dir", output_dir.string()},
                {"query", query},
                {"prompts_dir", prompts_dir.string()},
                {"backend", backend_json},
                {"backbone",
                 {{"max_search_iterations", backbone.max_search_iterations},
                  {"search_k", backbone.search_k},
                  {"coverage_check", backbone.coverage_check},
                  {"templates", templates}}},
                {"evolution",
                 {{"n_p", evolution.n_p},
                  {"n_q", evolution.n_q},
                  {"n_a", evolution.n_a},
                  {"n_r", evolution.n_r},
                  {"s_p", evolution.s_p},
                  {"s_q", evolution.s_q},
                  {"s_a", evolution.s_a},
                  {"s_r", evolution.s_r},
                  {"sampling_schedule", evolution.sampling_schedule}}},
                {"denoise",
                 {{"max_steps", denoise.max_steps},
                  {"exit_predicate", denoise.exit_predicate},
                  {"draft_conditioning", denoise.draft_conditioning},
                  {"self_evolution", denoise.self_evolution}}}};
}

void RunConfig::validate() const {
    if (backend.kind != "simulation" && backend.kind != "live") {
        throw ConfigError("backend.kind must be 'simulation' or 'live'");
    }
    if (backend.kind == "simulation" && backend.corpus.empty()) {
        throw ConfigError("simulation backend requires backend.corpus");
    }
    if (backend.kind == "live") {
        if (backend.generation.base_url.empty()) throw ConfigError("live backend requires backend.generation.base_url");
        if (backend.search.base_url.empty()) throw ConfigError("live backend requires backend.search.base_url");
    }
    require_positive(backbone.max_search_iterations, "backbone.max_search_iterations");
    require_positive(backbone.search_k, "backbone.search_k");
    if (!backbone.coverage_check.empty() && backbone.coverage_check != "exact" && backbone.coverage_check != "judge") {
        throw ConfigError("backbone.coverage_check must be 'exact' or 'judge'");
    }
    require_positive(evolution.n_p, "evolution.n_p");
    require_positive(evolution.n_q, "evolution.n_q");
    require_positive(evolution.n_a, "evolution.n_a");
    require_positive(evolution.n_r, "evolution.n_r");
    require_non_negative(evolution.s_p, "evolution.s_p");
    require_non_negative(evolution.s_q, "evolution.s_q");
    require_non_negative(evolution.s_a, "evolution.s_a");
    require_non_negative(evolution.s_r, "evolution.s_r");
    SamplingSchedule::by_id(evolution.sampling_schedule);
    require_positive(denoise.max_steps, "denoise.max_steps");
    if (denoise.exit_predicate.empty()) throw ConfigError("denoise.exit_predicate must be set");
}

std::string RunConfig::identifier() const {
    auto j = to_json();
    j.erase("output_dir");
    j.erase("query");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(text::fnv1a(j.dump())));
    return std::string(to_string(mode)) + "-" + buf;
}

} // namespace redraft
