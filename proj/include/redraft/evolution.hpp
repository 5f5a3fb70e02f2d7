#pragma once

#include <optional>
#include <string>
#include <vector>

#include "redraft/backend.hpp"
#include "redraft/workflow.hpp"

// Component-wise self-evolution: fan out variants, score and revise each, then merge.
namespace redraft {

/// What one stage asks for: its prompt plus the labels that make calls reproducible.
struct EvolutionContext {
    std::string stage;       // trajectory label and seed key
    Role role = Role::plan;
    std::string template_id; // template that produced `prompt`
    std::string prompt;
    std::string query;
    int step = 0;
};

struct Variant {
    std::string content;
    std::optional<double> fitness;
    std::vector<std::string> critiques;
    int episode = 0;
    int variant_index = 0;
    bool failed = false;
    std::string failure;
};

struct Evaluation {
    double fitness = 0.0;
    std::vector<std::string> critiques;
};

/// `n` variants drawn with the sampling schedule, slot i for variant i. A backend failure marks
/// that variant failed; if every variant fails the last error is rethrown.
std::vector<Variant> spawn_initial_states(RunContext& ctx, const EvolutionContext& ec, int n);

/// Judge call with the fitness rubric. Scores outside [0, ctx.fitness_max] are a ValidationError.
/// A score below the maximum always comes with at least one critique.
Evaluation evaluate_variant(RunContext& ctx, const EvolutionContext& ec, const Variant& variant);

/// Regenerates the content with the critiques in the prompt; episode goes up by one.
Variant revise_variant(RunContext& ctx, const EvolutionContext& ec, const Variant& variant,
                       const std::vector<std::string>& critiques);

/// One merge call over the candidates' contents.
std::string crossover_merge(RunContext& ctx, const EvolutionContext& ec, const std::vector<Variant>& variants);

struct EvolutionOutcome {
    std::string content;
    std::vector<Variant> variants;
};

/// spawn n, then per variant s rounds of (evaluate, revise), a final evaluation, and one merge
/// over the variants that did not fail.
EvolutionOutcome evolve(RunContext& ctx, const EvolutionContext& ec, int n, int s);

/// Slot-0 call: what a unit agent issues when self-evolution is off.
std::string plain_generate(RunContext& ctx, const EvolutionContext& ec);

} // namespace redraft
