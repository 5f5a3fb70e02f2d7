#include <doctest.h>

#include <random>

#include "redraft/error.hpp"
#include "redraft/pipeline.hpp"
#include "support.hpp"

using namespace redraft;
using testsupport::Rig;

namespace {

Registry scripted_registry() {
    Registry r;
    r.add_agent("A", [](const ResearchState& s, RunContext&, const LeafInvocation&) {
        auto out = s;
        out.query += "A";
        return out;
    });
    r.add_agent("B", [](const ResearchState& s, RunContext&, const LeafInvocation&) {
        auto out = s;
        out.query += "B";
        return out;
    });
    r.add_agent("tick", [](const ResearchState& s, RunContext&, const LeafInvocation&) {
        auto out = s;
        out.qa_history.push_back(QAPair{"q", "a", {}, s.step + 1, 0});
        out.step = s.step + 1;
        return out;
    });
    r.add_agent("fail", [](const ResearchState&, RunContext&, const LeafInvocation&) -> ResearchState {
        throw TransportError("provider down", false);
    });
    return r;
}

} // namespace

TEST_CASE("Sequential threads state through its children in order") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    auto reg = scripted_registry();
    ResearchState s;
    s.query = "s";
    auto out = run_workflow(sequential("seq", {unit("A"), unit("B")}), s, rig.ctx, reg);
    CHECK(out.query == "sAB");
    auto leaves = rig.trajectory.records_of_kind("leaf");
    REQUIRE(leaves.size() == 2);
    CHECK(leaves[0].at("node") == "seq/A");
    CHECK(leaves[1].at("node") == "seq/B");
}

TEST_CASE("Loop with zero iterations leaves the state and trajectory untouched") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    auto reg = scripted_registry();
    ResearchState s;
    s.query = "s";
    auto out = run_workflow(loop("l", unit("tick"), 0, "never"), s, rig.ctx, reg);
    CHECK(out == s);
    CHECK(rig.trajectory.size() == 0);
}

TEST_CASE("Loop runs min(max, first firing iteration) bodies") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> dist(0, 12);
    for (int trial = 0; trial < 200; ++trial) {
        int max = dist(rng);
        int fire_at = dist(rng) + 1;
        Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
        auto reg = scripted_registry();
        reg.add_predicate("at", [fire_at](const ResearchState& s, RunContext&) { return s.step >= fire_at; });
        auto out = run_workflow(loop("l", unit("tick"), max, "at"), ResearchState{}, rig.ctx, reg);
        int expected = std::min(max, fire_at);
        CHECK(out.step == expected);
        CHECK(static_cast<int>(out.qa_history.size()) == expected);
        CHECK(static_cast<int>(rig.trajectory.count_kind("commit")) == expected);
        CHECK(static_cast<int>(rig.trajectory.count_kind("predicate")) == expected);
    }
}

TEST_CASE("commit records snapshot the state after each body") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    auto reg = scripted_registry();
    run_workflow(loop("l", unit("tick"), 3, "never"), ResearchState{}, rig.ctx, reg);
    auto commits = rig.trajectory.records_of_kind("commit");
    REQUIRE(commits.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(commits[i].at("iteration") == i + 1);
        CHECK(restore(commits[i].at("state")).step == i + 1);
    }
}

TEST_CASE("Parallel of identical plan units with merge 'first' equals the unit") {
    auto corpus = testsupport::make_corpus(3, 2);
    Rig a(corpus, testsupport::sim_config(Mode::backbone));
    Rig b(corpus, testsupport::sim_config(Mode::backbone));
    auto reg = pipeline_registry();
    ResearchState s;
    s.query = "EV battery market";
    auto single = run_workflow(unit("plan", "plan"), s, a.ctx, reg);
    auto fanned = run_workflow(parallel("p", {unit("plan", "plan"), unit("plan", "plan"), unit("plan", "plan")}, "first"),
                               s, b.ctx, reg);
    CHECK(single.plan == fanned.plan);
    CHECK(single == fanned);
}

TEST_CASE("Parallel branches work on copies; concurrent and serial runs agree") {
    auto reg = scripted_registry();
    reg.add_merge("concat", [](const ResearchState& in, const std::vector<ResearchState>& branches, RunContext&) {
        auto out = in;
        for (const auto& b : branches) out.query += "|" + b.query;
        return out;
    });
    auto tree = parallel("p", {unit("A"), unit("B"), sequential("ab", {unit("A"), unit("B")})}, "concat");
    ResearchState s;
    s.query = "s";
    Rig serial(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    Rig threaded(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    threaded.ctx.concurrent_parallel = true;
    auto a = run_workflow(tree, s, serial.ctx, reg);
    auto b = run_workflow(tree, s, threaded.ctx, reg);
    CHECK(a.query == "s|sA|sB|sAB");
    CHECK(a == b);
    auto ra = serial.trajectory.records();
    auto rb = threaded.trajectory.records();
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].dump() == rb[i].dump());
}

TEST_CASE("unknown ids are configuration errors") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    auto reg = scripted_registry();
    CHECK_THROWS_AS(validate_workflow(unit("nobody"), reg), ConfigError);
    CHECK_THROWS_AS(validate_workflow(loop("l", unit("A"), 1, "missing"), reg), ConfigError);
    CHECK_THROWS_AS(validate_workflow(parallel("p", {}, "first"), reg), ConfigError);
    CHECK_THROWS_AS(validate_workflow(loop("l", unit("A"), -1, "never"), reg), ConfigError);
    CHECK_THROWS_AS(run_workflow(unit("nobody"), ResearchState{}, rig.ctx, reg), ConfigError);
}

TEST_CASE("leaf failures propagate with the node path and are recorded") {
    Rig rig(testsupport::make_corpus(1, 1), testsupport::sim_config(Mode::backbone));
    auto reg = scripted_registry();
    try {
        run_workflow(sequential("root", {unit("A"), loop("l", unit("fail"), 2, "never")}), ResearchState{}, rig.ctx,
                     reg);
        FAIL("error swallowed");
    } catch (const TransportError& e) {
        CHECK(e.node_path() == "root/l/fail");
    }
    auto errors = rig.trajectory.records_of_kind("error");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].at("node") == "root/l/fail");
    CHECK(errors[0].at("error_class") == "transport");
    CHECK(rig.trajectory.count_kind("commit") == 0);
}

TEST_CASE("identical runs produce identical trajectories") {
    auto corpus = testsupport::make_corpus(3, 2);
    auto run = [&] {
        Rig rig(corpus, testsupport::sim_config(Mode::evolution));
        ResearchState s;
        s.query = "q";
        run_pipeline(s, rig.ctx, pipeline_registry());
        std::string all;
        for (const auto& r : rig.trajectory.records()) all += r.dump() + "\n";
        return all;
    };
    CHECK(run() == run());
}
