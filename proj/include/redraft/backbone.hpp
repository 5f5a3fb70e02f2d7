#pragma once

#include <string>
#include <string_view>

#include "redraft/evolution.hpp"
#include "redraft/workflow.hpp"

// The three-stage research agent: plan, iterative search and synthesis, final report.
namespace redraft {

/// Answer recorded when a search returns no documents.
inline constexpr std::string_view kNoEvidenceAnswer = "No evidence found: the search returned no documents.";

/// Self-evolution counts for a stage ("plan", "question", "answer", "report").
struct StageCounts {
    int n = 1;
    int s = 0;
};
StageCounts stage_counts(const EvolutionConfig& config, std::string_view stage);

/// Evolves the stage output when self-evolution is active for the run, else one slot-0 call.
std::string stage_output(RunContext& ctx, const EvolutionContext& ec);

/// Stage 1. Throws PreconditionError for an empty query, ValidationError for a plan
/// without numbered areas.
std::string generate_plan(const ResearchState& state, RunContext& ctx, const std::string& template_id = "plan");

/// Stage 2a. The prompt carries query, plan and recent history; with a draft set it also
/// carries the draft and its gap digest. Throws PreconditionError without a plan.
std::string generate_question(const ResearchState& state, RunContext& ctx, const std::string& template_id);

/// Stage 2b: search, then synthesize an answer from the retrieved documents.
/// Empty retrieval yields kNoEvidenceAnswer without a generation call.
QAPair synthesize_answer(RunContext& ctx, const std::string& query, const std::string& question, int k,
                         int step_index, const std::string& template_id = "answer");

/// Every plan heading appears in some asked question.
bool plan_covered(const ResearchState& state);

/// Coverage predicate. With a draft (and draft conditioning on) the draft must have no gaps;
/// otherwise the plan must be covered, checked exactly or by the judge per configuration.
bool coverage_reached(const ResearchState& state, RunContext& ctx);

/// True when step reached the iteration budget or the coverage predicate fires.
bool should_stop(const ResearchState& state, RunContext& ctx);

/// Stage 3 over the plan and the full history, plus the latest draft when one exists.
/// Throws PreconditionError for an empty history.
Report generate_report(const ResearchState& state, RunContext& ctx, const std::string& template_id = "report");

struct RunOutcome {
    ResearchState state;
    Report report;
};

/// Stage 1, Loop(2a, 2b), Stage 3 through run_workflow.
RunOutcome run_backbone(const std::string& query, RunContext& ctx);

} // namespace redraft
