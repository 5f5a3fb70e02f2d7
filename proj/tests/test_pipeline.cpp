#include <doctest.h>

#include <set>

#include "redraft/denoise.hpp"
#include "redraft/documents.hpp"
#include "redraft/error.hpp"
#include "redraft/evolution.hpp"
#include "redraft/pipeline.hpp"
#include "support.hpp"

using namespace redraft;
using testsupport::Rig;

namespace {

class FailingSearch final : public SearchProvider {
public:
    std::vector<SearchResult> search(std::string_view, int) override { throw TransportError("index offline", false); }
};

std::set<int> ids(const Rig& rig, const std::string& text) {
    auto v = rig.key_points(text);
    return {v.begin(), v.end()};
}

ResearchState planned(Rig& rig, const std::string& query = "state of the test topic") {
    ResearchState s;
    s.query = query;
    s.plan = generate_plan(s, rig.ctx);
    return s;
}

std::vector<std::string> questions(const ResearchState& s) {
    std::vector<std::string> out;
    for (const auto& qa : s.qa_history) out.push_back(qa.question);
    return out;
}

EvolutionContext answer_stage(Rig& rig, const std::string& docs) {
    return EvolutionContext{"answer", Role::answer, "answer",
                            rig.prompts.render("answer", {{"question", "q"}, {"documents", docs}}), "q", 0};
}

} // namespace

TEST_CASE("plan stage lists one numbered area per corpus section") {
    Rig rig(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::backbone));
    auto s = planned(rig);
    auto areas = parse_plan(*s.plan);
    REQUIRE(areas.size() == 3);
    CHECK(areas[1].title == "Pricing");
    ResearchState empty;
    CHECK_THROWS_AS(generate_plan(empty, rig.ctx), PreconditionError);
}

TEST_CASE("questions target the first plan area not yet asked about") {
    Rig rig(testsupport::make_corpus(3, 1), testsupport::sim_config(Mode::backbone));
    ResearchState no_plan;
    no_plan.query = "q";
    CHECK_THROWS_AS(generate_question(no_plan, rig.ctx, "question"), PreconditionError);
    auto s = planned(rig);
    auto q1 = generate_question(s, rig.ctx, "question");
    CHECK(q1.find("Chemistry") != std::string::npos);
    s.qa_history.push_back(QAPair{q1, "a", {}, 1, 0});
    s.step = 1;
    CHECK(generate_question(s, rig.ctx, "question").find("Pricing") != std::string::npos);
}

TEST_CASE("answers carry exactly the key points of the retrieved documents") {
    Rig rig(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::backbone));
    auto qa = synthesize_answer(rig.ctx, "q", "Pricing", 10, 1);
    CHECK(qa.sources.size() == 2);
    CHECK(ids(rig, qa.answer) == std::set<int>{3, 4});
    CHECK(qa.step_index == 1);
    CHECK(qa.elapsed_ms > 0);

    auto one = synthesize_answer(rig.ctx, "q", "Pricing", 1, 2);
    CHECK(one.sources.size() == 1);
    CHECK(ids(rig, one.answer).size() == 1);
}

TEST_CASE("empty retrieval yields the no-evidence answer without a generation call") {
    Rig rig(testsupport::make_corpus(2, 1), testsupport::sim_config(Mode::backbone));
    auto qa = synthesize_answer(rig.ctx, "q", "zebra crossing", 5, 1);
    CHECK(qa.sources.empty());
    CHECK(qa.answer == kNoEvidenceAnswer);
    CHECK(rig.trajectory.count_kind("generate") == 0);
    CHECK(rig.trajectory.count_kind("search") == 1);
    CHECK_THROWS_AS(synthesize_answer(rig.ctx, "q", "  ", 5, 1), PreconditionError);
}

TEST_CASE("should_stop fires at the budget or once every area was asked about") {
    auto config = testsupport::sim_config(Mode::backbone);
    config.backbone.max_search_iterations = 2;
    Rig rig(testsupport::make_corpus(3, 1), config);
    auto s = planned(rig);
    CHECK_FALSE(should_stop(s, rig.ctx));
    s.qa_history.push_back(QAPair{"About Chemistry?", "a", {}, 1, 0});
    s.step = 1;
    CHECK_FALSE(should_stop(s, rig.ctx));
    s.qa_history.push_back(QAPair{"About Pricing and Integration?", "a", {}, 2, 0});
    s.step = 2;
    CHECK(plan_covered(s));
    s.qa_history.pop_back();
    s.step = 2;
    CHECK(should_stop(s, rig.ctx));
}

TEST_CASE("report requires history and reflects the gathered key points") {
    Rig rig(testsupport::make_corpus(3, 1), testsupport::sim_config(Mode::backbone));
    auto s = planned(rig);
    CHECK_THROWS_AS(generate_report(s, rig.ctx), PreconditionError);
    s.qa_history.push_back(synthesize_answer(rig.ctx, s.query, "Pricing", 5, 1));
    s.step = 1;
    auto report = generate_report(s, rig.ctx);
    CHECK(ids(rig, report.body) == std::set<int>{2});
    CHECK(report.revision_index == 0);
}

TEST_CASE("backbone covers three areas in three iterations") {
    Rig rig(testsupport::make_corpus(3, 1), testsupport::sim_config(Mode::backbone));
    auto out = run_backbone("state of the test topic", rig.ctx);
    CHECK(out.state.qa_history.size() == 3);
    CHECK(out.state.step == 3);
    CHECK(ids(rig, out.report.body) == std::set<int>{1, 2, 3});
    CHECK_FALSE(out.state.draft);
}

TEST_CASE("backbone with a budget of one runs one iteration") {
    auto config = testsupport::sim_config(Mode::backbone);
    config.backbone.max_search_iterations = 1;
    Rig rig(testsupport::make_corpus(3, 1), config);
    auto out = run_backbone("q", rig.ctx);
    CHECK(out.state.qa_history.size() == 1);
    CHECK(rig.trajectory.count_kind("commit") == 1);
}

TEST_CASE("evolution with n=1 and s=0 reduces to a plain call") {
    Rig a(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::evolution));
    Rig b(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::evolution));
    auto ec = answer_stage(a, "<document>\nid: doc1\nChemistry findings: " + testsupport::planted_phrase(1) +
                                  " was observed.\n</document>");
    auto evolved = evolve(a.ctx, ec, 1, 0);
    CHECK(evolved.content == plain_generate(b.ctx, ec));
    CHECK(a.trajectory.count_kind("revise") == 0);
    CHECK(a.trajectory.count_kind("merge") == 1);
}

TEST_CASE("spawned variants use distinct sampling slots") {
    Rig rig(testsupport::make_corpus(4, 3), testsupport::sim_config(Mode::evolution));
    EvolutionContext ec{"plan", Role::plan, "plan", rig.prompts.render("plan", {{"query", "q"}}), "q", 0};
    auto variants = spawn_initial_states(rig.ctx, ec, 5);
    REQUIRE(variants.size() == 5);
    std::set<std::string> contents;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        CHECK(variants[i].variant_index == static_cast<int>(i));
        contents.insert(variants[i].content);
    }
    CHECK(contents.size() == 5);
    auto calls = rig.trajectory.records_of_kind("generate");
    REQUIRE(calls.size() == 5);
    CHECK(calls[0].at("temperature") == 0.0);
    CHECK(calls[1].at("temperature").get<double>() > 0.0);
}

TEST_CASE("fitness replies are validated") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::evolution));
    ScriptedGenerator judge;
    rig.ctx.judge_generator = &judge;
    rig.ctx.fitness_max = 10.0;
    EvolutionContext ec{"plan", Role::plan, "plan", "p", "q", 0};
    Variant v;
    v.content = "some content";
    judge.push_response("<score>7</score><critique>add numbers</critique><critique>cite</critique>");
    auto ev = evaluate_variant(rig.ctx, ec, v);
    CHECK(ev.fitness == 7.0);
    CHECK(ev.critiques == std::vector<std::string>{"add numbers", "cite"});
    judge.push_response("<score>4</score>");
    CHECK(evaluate_variant(rig.ctx, ec, v).critiques.size() == 1);
    judge.push_response("<score>10</score>");
    CHECK(evaluate_variant(rig.ctx, ec, v).critiques.empty());
    judge.push_response("<score>11</score>");
    CHECK_THROWS_AS(evaluate_variant(rig.ctx, ec, v), ValidationError);
    judge.push_response("<score>high</score>");
    CHECK_THROWS_AS(evaluate_variant(rig.ctx, ec, v), ParseError);
    judge.push_response("no score");
    CHECK_THROWS_AS(evaluate_variant(rig.ctx, ec, v), ParseError);
}

TEST_CASE("revision follows the critique") {
    Rig rig(testsupport::make_corpus(2, 2), testsupport::sim_config(Mode::evolution));
    EvolutionContext ec{"answer", Role::answer, "answer", "p", "q", 0};
    Variant v;
    v.content = "- " + testsupport::planted_phrase(1) + ".";
    auto ev = evaluate_variant(rig.ctx, ec, v);
    CHECK(ev.fitness == 1.0);
    REQUIRE_FALSE(ev.critiques.empty());
    auto revised = revise_variant(rig.ctx, ec, v, ev.critiques);
    CHECK(revised.episode == 1);
    CHECK(ids(rig, revised.content).size() == 2);
    CHECK(evaluate_variant(rig.ctx, ec, revised).fitness == 2.0);
    CHECK_THROWS_AS(revise_variant(rig.ctx, ec, v, {}), PreconditionError);
}

TEST_CASE("evolve call counts stay within n*(s+1) judge calls and n*(s+1)+1 generations") {
    for (int n = 1; n <= 4; ++n) {
        for (int s = 0; s <= 2; ++s) {
            Rig rig(testsupport::make_corpus(3, 3), testsupport::sim_config(Mode::evolution));
            EvolutionContext ec{"plan", Role::plan, "plan", rig.prompts.render("plan", {{"query", "q"}}), "q", 0};
            evolve(rig.ctx, ec, n, s);
            std::size_t judges = 0, gens = 0;
            for (const auto& r : rig.trajectory.records_of_kind("generate")) ++(r.at("role") == "judge" ? judges : gens);
            CHECK(judges <= static_cast<std::size_t>(n * (s + 1)));
            CHECK(judges >= static_cast<std::size_t>(n));
            CHECK(gens <= static_cast<std::size_t>(n * (s + 1) + 1));
            CHECK(rig.trajectory.count_kind("revise") <= static_cast<std::size_t>(n * s));
            if (s == 0) CHECK(rig.trajectory.count_kind("revise") == 0);
        }
    }
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::evolution));
    EvolutionContext ec{"plan", Role::plan, "plan", "PLAN: q", "q", 0};
    CHECK_THROWS_AS(evolve(rig.ctx, ec, 0, 0), PreconditionError);
    CHECK_THROWS_AS(evolve(rig.ctx, ec, 1, -1), PreconditionError);
}

TEST_CASE("a failed variant is dropped and the rest are merged") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::evolution));
    ScriptedGenerator gen;
    int seen = 0;
    gen.add_rule([&](const GenerationRequest& r) -> std::optional<std::string> {
        if (r.template_id == "merge") return std::string("merged");
        if (++seen == 2) throw TransportError("flaky", false);
        return "variant " + std::to_string(seen);
    });
    ScriptedGenerator judge;
    judge.add_rule([](const GenerationRequest&) { return std::optional<std::string>("<score>10</score>"); });
    Trajectory t;
    RunContext ctx(gen, rig.backend, rig.prompts, t, *rig.clock, testsupport::sim_config(Mode::evolution));
    ctx.judge_generator = &judge;
    EvolutionContext ec{"answer", Role::answer, "answer", "p", "q", 0};
    auto out = evolve(ctx, ec, 3, 0);
    CHECK(out.content == "merged");
    CHECK(out.variants[1].failed);
    CHECK(t.count_kind("variant_failed") == 1);
    CHECK(t.records_of_kind("merge").at(0).at("candidates") == nlohmann::json::array({0, 2}));

    ScriptedGenerator dead;
    dead.add_rule([](const GenerationRequest&) -> std::optional<std::string> { throw TransportError("down", false); });
    RunContext ctx2(dead, rig.backend, rig.prompts, t, *rig.clock, testsupport::sim_config(Mode::evolution));
    CHECK_THROWS_AS(evolve(ctx2, ec, 2, 0), TransportError);
}

TEST_CASE("gap summary lists plan areas the draft has not settled") {
    ResearchState s;
    s.query = "q";
    s.plan = "1. Chemistry: a\n2. Pricing: b\n3. Integration: c\n";
    s.draft = Report{"# Draft\n\n## 1. Chemistry\n- amber falcon.\n\n## 2. Pricing\n- (unverified) brisk / falcon.\n\n"
                     "## 3. Integration\n- cobalt falcon.\n",
                     0};
    auto gaps = draft_gap_summary(s);
    CHECK(gaps.areas == std::vector<int>{2});
    CHECK(gaps.text.find("2. Pricing: unverified claim: brisk / falcon") != std::string::npos);

    s.draft->body = "# Draft\n\n## 1. Chemistry\n- x.\n\n## 3. Integration\n";
    CHECK(draft_gap_summary(s).areas == std::vector<int>{2, 3});

    s.draft->body = "## 1. Chemistry\n- x.\n## 2. Pricing\n- y.\n## 3. Integration\n- z.\n";
    CHECK(draft_gap_summary(s).empty());
    CHECK(draft_gap_summary(s).text == "(none)");

    s.draft.reset();
    CHECK_THROWS_AS(draft_gap_summary(s), PreconditionError);
}

TEST_CASE("initial draft comes from internal knowledge only") {
    Rig rig(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::denoising));
    auto s = planned(rig);
    auto draft = initial_draft(s, rig.ctx);
    CHECK(draft.revision_index == 0);
    CHECK(rig.key_points(draft.body).empty());
    CHECK(rig.trajectory.count_kind("search") == 0);
    CHECK(draft_gap_summary(ResearchState{s.query, s.plan, {}, draft}).areas == std::vector<int>{1, 2, 3});
    Rig again(testsupport::make_corpus(3, 2), testsupport::sim_config(Mode::denoising));
    CHECK(initial_draft(planned(again), again.ctx) == draft);
}

TEST_CASE("a denoising step adds evidence and revises the draft by one") {
    auto config = testsupport::sim_config(Mode::denoising);
    config.denoise.self_evolution = false;
    Rig rig(testsupport::make_corpus(5, 1), config);
    auto s = planned(rig);
    s.draft = initial_draft(s, rig.ctx);
    // Settle areas 1 and 2 by hand so the draft covers {1,2}.
    s.draft = Report{"# Draft\n\n## 1. Chemistry\n- " + testsupport::planted_phrase(1) + ".\n\n## 2. Pricing\n- " +
                         testsupport::planted_phrase(2) + ".\n\n## 3. Integration\n- (unverified) " +
                         rig.corpus->noisy_form(3) + ".\n\n## 4. Policy\n\n## 5. Recycling\n",
                     0};
    auto before = ids(rig, s.draft->body);
    CHECK(before == std::set<int>{1, 2});
    auto after = denoise_step(s, rig.ctx);
    auto now = ids(rig, after.draft->body);
    CHECK(now.size() > before.size());
    CHECK(std::includes(now.begin(), now.end(), before.begin(), before.end()));
    CHECK(after.qa_history.size() == s.qa_history.size() + 1);
    CHECK(after.draft->revision_index == s.draft->revision_index + 1);
    CHECK(after.qa_history.back().question.find("Integration") != std::string::npos);
}

TEST_CASE("a failing denoising step leaves the state untouched") {
    auto config = testsupport::sim_config(Mode::denoising);
    Rig rig(testsupport::make_corpus(3, 1), config);
    auto s = planned(rig);
    s.draft = initial_draft(s, rig.ctx);
    auto copy = s;
    FailingSearch search;
    RunContext ctx(rig.backend, search, rig.prompts, rig.trajectory, *rig.clock, config);
    CHECK_THROWS_AS(denoise_step(s, ctx), TransportError);
    CHECK(s == copy);
    CHECK(rig.trajectory.count_kind("error") >= 1);
    ResearchState no_draft;
    CHECK_THROWS_AS(denoise_step(no_draft, rig.ctx), PreconditionError);
}

TEST_CASE("denoising with one step yields one pair") {
    auto config = testsupport::sim_config(Mode::denoising);
    config.denoise.max_steps = 1;
    Rig rig(testsupport::make_corpus(3, 2), config);
    auto out = run_denoising("q", rig.ctx);
    CHECK(out.state.qa_history.size() == 1);
    CHECK(out.state.draft->revision_index == 1);
    config.denoise.max_steps = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("an exit predicate firing at step five stops the loop there") {
    auto config = testsupport::sim_config(Mode::denoising);
    config.denoise.exit_predicate = "at_five";
    Rig rig(testsupport::make_corpus(4, 3), config);
    auto reg = pipeline_registry();
    reg.add_predicate("at_five", [](const ResearchState& s, RunContext&) { return s.step >= 5; });
    auto out = run_denoising("q", rig.ctx, reg);
    CHECK(out.state.qa_history.size() == 5);
    CHECK(out.state.draft->revision_index == 5);
    CHECK(out.report.revision_index == 5);
}

TEST_CASE("draft coverage never drops and reaches every key point") {
    Rig rig(testsupport::make_corpus(4, 3), testsupport::sim_config(Mode::denoising));
    std::vector<double> coverage;
    rig.ctx.on_draft = [&](const Report& r) { coverage.push_back(rig.corpus->key_point_coverage(r.body)); };
    auto out = run_denoising("q", rig.ctx);
    REQUIRE(coverage.size() >= 2);
    for (std::size_t i = 1; i < coverage.size(); ++i) CHECK(coverage[i] >= coverage[i - 1]);
    CHECK(coverage.back() == 1.0);
    CHECK(out.state.qa_history.size() <= 12);
    CHECK(rig.corpus->key_point_coverage(out.report.body) == 1.0);
}

TEST_CASE("every question prompt carries the previous draft") {
    auto config = testsupport::sim_config(Mode::denoising);
    config.denoise.self_evolution = false;
    Rig rig(testsupport::make_corpus(3, 2), config);
    std::vector<std::string> drafts;
    rig.ctx.on_draft = [&](const Report& r) { drafts.push_back(r.body); };
    auto out = run_denoising("q", rig.ctx);
    std::vector<std::string> prompts;
    for (const auto& r : rig.trajectory.records_of_kind("generate")) {
        if (r.at("template_id") == "question_with_draft") prompts.push_back(r.at("prompt"));
    }
    REQUIRE(prompts.size() == out.state.qa_history.size());
    for (std::size_t t = 0; t < prompts.size(); ++t) CHECK(prompts[t].find(drafts[t]) != std::string::npos);
}

TEST_CASE("without draft conditioning denoising asks the backbone's questions") {
    auto dn = testsupport::sim_config(Mode::denoising);
    dn.denoise.draft_conditioning = false;
    dn.denoise.self_evolution = false;
    Rig a(testsupport::make_corpus(4, 3), dn);
    Rig b(testsupport::make_corpus(4, 3), testsupport::sim_config(Mode::backbone));
    auto denoised = run_denoising("q", a.ctx);
    auto backbone = run_backbone("q", b.ctx);
    CHECK(questions(denoised.state) == questions(backbone.state));
}
