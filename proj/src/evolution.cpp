#include "redraft/evolution.hpp"

#include <cmath>

#include "redraft/error.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft {

using nlohmann::json;

namespace {

constexpr const char* kGenericCritique = "The candidate misses key information the query calls for.";

GenerationRequest request_for(const RunContext& ctx, const EvolutionContext& ec, int slot) {
    auto schedule = SamplingSchedule::by_id(ctx.config().evolution.sampling_schedule);
    auto params = schedule.at(slot, ctx.seed_for(ec.stage, ec.step));
    GenerationRequest r;
    r.prompt = ec.prompt;
    r.temperature = params.temperature;
    r.top_k = params.top_k;
    r.seed = params.seed;
    r.role = ec.role;
    r.template_id = ec.template_id;
    return r;
}

std::string render_critiques(const std::vector<std::string>& critiques) {
    std::string out;
    for (const auto& c : critiques) out += "- " + c + "\n";
    return out;
}

} // namespace

std::string plain_generate(RunContext& ctx, const EvolutionContext& ec) {
    return ctx.generate(request_for(ctx, ec, 0), ec.stage);
}

std::vector<Variant> spawn_initial_states(RunContext& ctx, const EvolutionContext& ec, int n) {
    if (n < 1) throw PreconditionError("spawn_initial_states needs n >= 1");
    std::vector<Variant> out;
    std::exception_ptr last_error;
    for (int i = 0; i < n; ++i) {
        Variant v;
        v.variant_index = i;
        try {
            v.content = ctx.generate(request_for(ctx, ec, i), ec.stage);
        } catch (const BackendError& e) {
            v.failed = true;
            v.failure = e.what();
            last_error = std::current_exception();
            ctx.record({{"kind", "variant_failed"}, {"stage", ec.stage}, {"variant_index", i}, {"message", e.what()}});
        }
        out.push_back(std::move(v));
    }
    bool any = false;
    for (const auto& v : out) any = any || !v.failed;
    if (!any) std::rethrow_exception(last_error);
    return out;
}

Evaluation evaluate_variant(RunContext& ctx, const EvolutionContext& ec, const Variant& variant) {
    if (text::trim(variant.content).empty()) throw PreconditionError("cannot evaluate an empty variant");
    auto raw = ctx.judge("fitness", {{"query", ec.query}, {"content", variant.content}}, ec.stage + ".fitness");
    auto body = judge::parse_tagged(raw, "score");
    Evaluation ev;
    try {
        std::size_t used = 0;
        ev.fitness = std::stod(body, &used);
        if (text::trim(body.substr(used)) != "") throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ParseError("score", "<score> does not hold a number: '" + body + "'");
    }
    if (!std::isfinite(ev.fitness) || ev.fitness < 0.0 || ev.fitness > ctx.fitness_max) {
        throw ValidationError("fitness " + body + " lies outside [0, " + std::to_string(ctx.fitness_max) + "]");
    }
    for (auto& c : judge::find_all_tagged(raw, "critique")) {
        if (!c.empty()) ev.critiques.push_back(std::move(c));
    }
    if (ev.fitness < ctx.fitness_max && ev.critiques.empty()) ev.critiques.emplace_back(kGenericCritique);
    ctx.record({{"kind", "fitness"},
                {"stage", ec.stage},
                {"variant_index", variant.variant_index},
                {"episode", variant.episode},
                {"fitness", ev.fitness},
                {"critiques", ev.critiques}});
    return ev;
}

Variant revise_variant(RunContext& ctx, const EvolutionContext& ec, const Variant& variant,
                       const std::vector<std::string>& critiques) {
    if (critiques.empty()) throw PreconditionError("revise_variant needs at least one critique");
    auto request = request_for(ctx, ec, variant.variant_index);
    request.prompt = ctx.prompts().render("revise_variant", {{"query", ec.query},
                                                             {"task", ec.prompt},
                                                             {"content", variant.content},
                                                             {"critiques", render_critiques(critiques)}});
    request.role = Role::revise;
    request.template_id = "revise_variant";
    Variant out = variant;
    out.content = ctx.generate(std::move(request), ec.stage + ".revise");
    out.episode = variant.episode + 1;
    out.fitness.reset();
    out.critiques.clear();
    ctx.record({{"kind", "revise"}, {"stage", ec.stage}, {"variant_index", out.variant_index}, {"episode", out.episode}});
    return out;
}

std::string crossover_merge(RunContext& ctx, const EvolutionContext& ec, const std::vector<Variant>& variants) {
    if (variants.empty()) throw PreconditionError("crossover_merge needs at least one variant");
    std::string list;
    for (const auto& v : variants) list += judge::emit_tagged("candidate", "\n" + v.content + "\n") + "\n";
    GenerationRequest request;
    request.prompt = ctx.prompts().render("merge", {{"query", ec.query}, {"answer_list", list}});
    request.role = Role::merge;
    request.template_id = "merge";
    request.seed = ctx.seed_for(ec.stage, ec.step);
    auto merged = ctx.generate(std::move(request), ec.stage + ".merge");
    json indices = json::array();
    for (const auto& v : variants) indices.push_back(v.variant_index);
    ctx.record({{"kind", "merge"}, {"stage", ec.stage}, {"candidates", indices}});
    return merged;
}

EvolutionOutcome evolve(RunContext& ctx, const EvolutionContext& ec, int n, int s) {
    if (n < 1) throw PreconditionError("evolve needs n >= 1");
    if (s < 0) throw PreconditionError("evolve needs s >= 0");
    EvolutionOutcome out;
    out.variants = spawn_initial_states(ctx, ec, n);
    for (auto& v : out.variants) {
        if (v.failed) continue;
        try {
            for (int round = 0; round < s; ++round) {
                auto ev = evaluate_variant(ctx, ec, v);
                v.fitness = ev.fitness;
                v.critiques = ev.critiques;
                if (ev.critiques.empty()) break;
                v = revise_variant(ctx, ec, v, ev.critiques);
            }
            auto final_ev = evaluate_variant(ctx, ec, v);
            v.fitness = final_ev.fitness;
            v.critiques = final_ev.critiques;
        } catch (const BackendError& e) {
            v.failed = true;
            v.failure = e.what();
            ctx.record({{"kind", "variant_failed"},
                        {"stage", ec.stage},
                        {"variant_index", v.variant_index},
                        {"message", e.what()}});
        }
    }
    std::vector<Variant> alive;
    for (const auto& v : out.variants) {
        if (!v.failed) alive.push_back(v);
    }
    if (alive.empty()) throw TransportError("every variant of stage " + ec.stage + " failed", false);
    out.content = crossover_merge(ctx, ec, alive);
    return out;
}

} // namespace redraft
