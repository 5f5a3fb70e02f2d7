#include "redraft/backbone.hpp"

#include <limits>

#include "redraft/denoise.hpp"
#include "redraft/documents.hpp"
#include "redraft/error.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft {

namespace {

constexpr std::size_t kAllPairs = std::numeric_limits<std::size_t>::max();

} // namespace

StageCounts stage_counts(const EvolutionConfig& c, std::string_view stage) {
    if (stage == "plan") return {c.n_p, c.s_p};
    if (stage == "question") return {c.n_q, c.s_q};
    if (stage == "answer") return {c.n_a, c.s_a};
    if (stage == "report") return {c.n_r, c.s_r};
    return {1, 0};
}

std::string stage_output(RunContext& ctx, const EvolutionContext& ec) {
    if (!ctx.evolution_active()) return plain_generate(ctx, ec);
    auto counts = stage_counts(ctx.config().evolution, ec.stage);
    return evolve(ctx, ec, counts.n, counts.s).content;
}

std::string generate_plan(const ResearchState& state, RunContext& ctx, const std::string& template_id) {
    if (text::trim(state.query).empty()) throw PreconditionError("generate_plan needs a non-empty query");
    EvolutionContext ec{"plan", Role::plan, template_id, ctx.prompts().render(template_id, {{"query", state.query}}),
                        state.query, state.step};
    auto plan = stage_output(ctx, ec);
    if (parse_plan(plan).empty()) throw ValidationError("plan lists no numbered research areas");
    return plan;
}

std::string generate_question(const ResearchState& state, RunContext& ctx, const std::string& template_id) {
    if (!state.plan) throw PreconditionError("generate_question needs a plan");
    std::map<std::string, std::string> values{
        {"query", state.query}, {"plan", *state.plan}, {"history", render_history(state.qa_history)}};
    if (state.draft) {
        values["draft"] = state.draft->body;
        values["gaps"] = draft_gap_summary(state).text;
    }
    EvolutionContext ec{"question", Role::question, template_id, ctx.prompts().render(template_id, values),
                        state.query, state.step};
    return text::trim(stage_output(ctx, ec));
}

QAPair synthesize_answer(RunContext& ctx, const std::string& query, const std::string& question, int k,
                         int step_index, const std::string& template_id) {
    if (text::trim(question).empty()) throw PreconditionError("synthesize_answer needs a non-empty question");
    auto start = ctx.clock().now_ms();
    QAPair qa;
    qa.question = question;
    qa.step_index = step_index;
    qa.sources = ctx.search(question, k, "search");
    if (qa.sources.empty()) {
        qa.answer = std::string(kNoEvidenceAnswer);
    } else {
        EvolutionContext ec{"answer", Role::answer, template_id,
                            ctx.prompts().render(template_id, {{"question", question},
                                                               {"documents", render_documents(qa.sources)}}),
                            query, step_index - 1};
        qa.answer = stage_output(ctx, ec);
    }
    qa.elapsed_ms = ctx.clock().now_ms() - start;
    return qa;
}

bool plan_covered(const ResearchState& state) {
    if (!state.plan) return false;
    auto areas = parse_plan(*state.plan);
    if (areas.empty()) return false;
    for (const auto& a : areas) {
        bool asked = false;
        for (const auto& qa : state.qa_history) asked = asked || text::contains_ci(qa.question, a.title);
        if (!asked) return false;
    }
    return true;
}

bool coverage_reached(const ResearchState& state, RunContext& ctx) {
    if (state.draft && ctx.config().denoise.draft_conditioning) return draft_gap_summary(state).empty();
    auto check = ctx.config().backbone.coverage_check;
    if (check.empty()) check = ctx.config().simulation() ? "exact" : "judge";
    if (check == "exact" || !state.plan) return plan_covered(state);
    auto reply = ctx.judge("coverage_check",
                           {{"plan", *state.plan}, {"history", render_history(state.qa_history, kAllPairs)}},
                           "coverage");
    return judge::parse_yes_no(reply, "covered");
}

bool should_stop(const ResearchState& state, RunContext& ctx) {
    return state.step >= ctx.config().backbone.max_search_iterations || coverage_reached(state, ctx);
}

Report generate_report(const ResearchState& state, RunContext& ctx, const std::string& template_id) {
    if (state.qa_history.empty()) throw PreconditionError("generate_report needs at least one search iteration");
    std::string draft_section;
    if (state.draft) {
        draft_section = "\nHere is the latest revision of the draft report.\n<draft>\n" + state.draft->body +
                        "\n</draft>\n";
    }
    EvolutionContext ec{"report",
                        Role::report,
                        template_id,
                        ctx.prompts().render(template_id, {{"query", state.query},
                                                           {"plan", state.plan.value_or("(no plan)")},
                                                           {"history", render_history(state.qa_history, kAllPairs)},
                                                           {"draft_section", draft_section}}),
                        state.query,
                        state.step};
    return Report{stage_output(ctx, ec), state.draft ? state.draft->revision_index : 0};
}

} // namespace redraft
