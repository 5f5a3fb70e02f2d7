#include "redraft/denoise.hpp"

#include <limits>

#include "redraft/documents.hpp"
#include "redraft/error.hpp"
#include "redraft/pipeline.hpp"
#include "redraft/text.hpp"

namespace redraft {

namespace {

std::string heading_title(const std::string& heading) {
    auto parsed = parse_plan(heading);
    if (!parsed.empty()) return parsed.front().title;
    return text::trim(heading);
}

const DraftSection* section_for(const std::vector<DraftSection>& sections, const std::string& title) {
    auto want = text::normalize(title);
    for (const auto& s : sections) {
        if (text::normalize(heading_title(s.heading)) == want) return &s;
    }
    return nullptr;
}

std::optional<std::string> gap_reason(const DraftSection* section) {
    if (!section) return "section missing from the draft";
    if (section->lines.empty()) return "section is empty";
    for (const auto& l : section->lines) {
        if (is_unverified(l)) return "unverified claim: " + unverified_claim(l);
    }
    return std::nullopt;
}

} // namespace

GapSummary draft_gap_summary(const ResearchState& state) {
    if (!state.draft) throw PreconditionError("draft_gap_summary needs a draft");
    auto sections = parse_draft(state.draft->body);
    std::vector<PlanArea> areas;
    if (state.plan) areas = parse_plan(*state.plan);
    if (areas.empty()) {
        int i = 0;
        for (const auto& s : sections) areas.push_back(PlanArea{++i, heading_title(s.heading), {}});
    }
    GapSummary out;
    for (const auto& a : areas) {
        auto reason = gap_reason(section_for(sections, a.title));
        if (!reason) continue;
        out.areas.push_back(a.index);
        out.text += "- " + std::to_string(a.index) + ". " + a.title + ": " + *reason + "\n";
    }
    if (out.text.empty()) out.text = "(none)";
    return out;
}

Report initial_draft(const ResearchState& state, RunContext& ctx, const std::string& template_id) {
    if (!state.plan) throw PreconditionError("initial_draft needs a plan");
    EvolutionContext ec{"draft", Role::draft, template_id,
                        ctx.prompts().render(template_id, {{"query", state.query}, {"plan", *state.plan}}),
                        state.query, 0};
    return Report{plain_generate(ctx, ec), 0};
}

Report revise_draft(const ResearchState& state, RunContext& ctx, const std::string& template_id) {
    if (!state.draft) throw PreconditionError("revise_draft needs a draft");
    EvolutionContext ec{"revise_draft",
                        Role::revise,
                        template_id,
                        ctx.prompts().render(template_id,
                                             {{"query", state.query},
                                              {"plan", state.plan.value_or("(no plan)")},
                                              {"draft", state.draft->body},
                                              {"history", render_history(state.qa_history,
                                                                         std::numeric_limits<std::size_t>::max())}}),
                        state.query,
                        state.step};
    return Report{plain_generate(ctx, ec), state.draft->revision_index + 1};
}

ResearchState denoise_step(const ResearchState& state, RunContext& ctx) {
    if (!state.draft) throw PreconditionError("denoise_step needs a draft");
    return run_workflow(loop_body(ctx.config()), state, ctx, pipeline_registry());
}

RunOutcome run_denoising(const std::string& query, RunContext& ctx) {
    return run_denoising(query, ctx, pipeline_registry());
}

RunOutcome run_denoising(const std::string& query, RunContext& ctx, const Registry& registry) {
    ctx.mutable_config().mode = Mode::denoising;
    ResearchState initial;
    initial.query = query;
    return run_pipeline(initial, ctx, registry);
}

} // namespace redraft
