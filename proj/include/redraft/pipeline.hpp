#pragma once

#include <optional>
#include <string>

#include "redraft/backbone.hpp"
#include "redraft/workflow.hpp"

namespace redraft {

/// Agents "plan", "question", "answer", "draft", "revise_draft", "report" and the exit
/// predicate "coverage".
void register_pipeline(Registry& registry);

Registry pipeline_registry();

/// Where a resumed run picks up: loop iterations already committed and whether the last
/// commit fired the exit predicate.
struct ResumeFrom {
    int completed_iterations = 0;
    bool exited = false;
};

/// Workflow tree for the configured mode. With `resume`, the stages before the loop are
/// dropped and the loop runs only its remaining iterations.
WorkflowNode pipeline_workflow(const RunConfig& config, std::optional<ResumeFrom> resume = std::nullopt);

/// Loop body of the configured mode (one search iteration or one denoising step).
WorkflowNode loop_body(const RunConfig& config);

/// Runs the mode's tree from `initial` and returns the final state and report.
RunOutcome run_pipeline(const ResearchState& initial, RunContext& ctx, const Registry& registry,
                        std::optional<ResumeFrom> resume = std::nullopt);

} // namespace redraft
