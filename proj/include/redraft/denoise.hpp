#pragma once

#include <string>
#include <vector>

#include "redraft/backbone.hpp"

// Report-level denoising: the draft steers each search question and is revised by each answer.
namespace redraft {

struct GapSummary {
    std::vector<int> areas; // plan area numbers with a gap, in plan order
    std::string text;       // "- N. Title: reason" lines, "(none)" when empty

    bool empty() const { return areas.empty(); }
};

/// Plan areas whose draft section is missing, empty, or still holds unverified claims.
/// Without a plan the draft's own sections are checked. Throws PreconditionError without a draft.
GapSummary draft_gap_summary(const ResearchState& state);

/// Draft written from the model's own knowledge; no search precedes it. revision_index 0.
Report initial_draft(const ResearchState& state, RunContext& ctx, const std::string& template_id = "draft");

/// Draft revised with the full history; revision_index goes up by one.
Report revise_draft(const ResearchState& state, RunContext& ctx, const std::string& template_id = "revise_draft");

/// One atomic step: question from the draft, search and answer, draft revision.
/// On failure the input state is untouched and the error propagates.
ResearchState denoise_step(const ResearchState& state, RunContext& ctx);

/// Plan, initial draft, Loop(denoise_step) for at most max_steps, final report.
RunOutcome run_denoising(const std::string& query, RunContext& ctx);
/// Same, with agents and predicates taken from `registry`.
RunOutcome run_denoising(const std::string& query, RunContext& ctx, const Registry& registry);

} // namespace redraft
