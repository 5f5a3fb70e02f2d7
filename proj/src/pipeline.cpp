#include "redraft/pipeline.hpp"

#include <algorithm>

#include "redraft/denoise.hpp"
#include "redraft/error.hpp"

namespace redraft {

namespace {

const std::string& template_or(const LeafInvocation& inv, const RunContext& ctx, const std::string& stage) {
    return inv.template_id.empty() ? ctx.config().backbone.template_for(stage) : inv.template_id;
}

bool denoising(const RunConfig& c) {
    return c.mode == Mode::denoising;
}

WorkflowNode search_loop(const RunConfig& config, int offset) {
    if (denoising(config)) {
        int max = std::max(0, config.denoise.max_steps - offset);
        return loop("denoise", loop_body(config), max, config.denoise.exit_predicate, offset);
    }
    int max = std::max(0, config.backbone.max_search_iterations - offset);
    return loop("search", loop_body(config), max, "coverage", offset);
}

} // namespace

void register_pipeline(Registry& registry) {
    registry.add_agent("plan", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        auto out = s;
        out.plan = generate_plan(s, ctx, template_or(inv, ctx, "plan"));
        return out;
    });
    registry.add_agent("question", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        auto out = s;
        out.pending_question = generate_question(s, ctx, template_or(inv, ctx, "question"));
        return out;
    });
    registry.add_agent("answer", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        if (!s.pending_question) throw PreconditionError("answer stage runs without a pending question");
        auto qa = synthesize_answer(ctx, s.query, *s.pending_question, ctx.config().backbone.search_k, s.step + 1,
                                    template_or(inv, ctx, "answer"));
        auto out = s;
        out.qa_history.push_back(std::move(qa));
        out.step = s.step + 1;
        out.pending_question.reset();
        return out;
    });
    registry.add_agent("draft", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        auto out = s;
        out.draft = initial_draft(s, ctx, template_or(inv, ctx, "draft"));
        if (ctx.on_draft) ctx.on_draft(*out.draft);
        return out;
    });
    registry.add_agent("revise_draft", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        auto out = s;
        out.draft = revise_draft(s, ctx, template_or(inv, ctx, "revise_draft"));
        if (ctx.on_draft) ctx.on_draft(*out.draft);
        return out;
    });
    registry.add_agent("report", [](const ResearchState& s, RunContext& ctx, const LeafInvocation& inv) {
        auto out = s;
        out.final_report = generate_report(s, ctx, template_or(inv, ctx, "report"));
        return out;
    });
    registry.add_predicate("coverage", [](const ResearchState& s, RunContext& ctx) { return coverage_reached(s, ctx); });
}

Registry pipeline_registry() {
    Registry r;
    register_pipeline(r);
    return r;
}

WorkflowNode loop_body(const RunConfig& config) {
    const auto& t = config.backbone;
    if (denoising(config)) {
        auto question = config.denoise.draft_conditioning ? t.template_for("question_with_draft")
                                                          : t.template_for("question");
        return sequential("step", {unit("question", question), unit("answer", t.template_for("answer")),
                                   unit("revise_draft", t.template_for("revise_draft"))});
    }
    return sequential("iteration", {unit("question", t.template_for("question")), unit("answer", t.template_for("answer"))});
}

WorkflowNode pipeline_workflow(const RunConfig& config, std::optional<ResumeFrom> resume) {
    const auto& t = config.backbone;
    std::vector<WorkflowNode> children;
    if (!resume) {
        children.push_back(unit("plan", t.template_for("plan")));
        if (denoising(config)) children.push_back(unit("draft", t.template_for("draft")));
    }
    if (!resume || !resume->exited) children.push_back(search_loop(config, resume ? resume->completed_iterations : 0));
    children.push_back(unit("report", t.template_for("report")));
    return sequential("pipeline", std::move(children));
}

RunOutcome run_pipeline(const ResearchState& initial, RunContext& ctx, const Registry& registry,
                        std::optional<ResumeFrom> resume) {
    auto tree = pipeline_workflow(ctx.config(), resume);
    validate_workflow(tree, registry);
    auto state = run_workflow(tree, initial, ctx, registry);
    if (!state.final_report) throw ValidationError("workflow finished without a report");
    auto report = *state.final_report;
    return RunOutcome{std::move(state), std::move(report)};
}

RunOutcome run_backbone(const std::string& query, RunContext& ctx) {
    if (ctx.config().mode == Mode::denoising) ctx.mutable_config().mode = Mode::backbone;
    ResearchState initial;
    initial.query = query;
    return run_pipeline(initial, ctx, pipeline_registry());
}

} // namespace redraft
