#include <doctest.h>

#include <cmath>

#include "redraft/error.hpp"
#include "redraft/judge.hpp"
#include "redraft/metrics.hpp"
#include "support.hpp"

using namespace redraft;
using namespace redraft::judge;

namespace {

JudgeFn fixed(std::string reply) {
    return [reply](const std::string&, const std::map<std::string, std::string>&) { return reply; };
}

HelpfulnessLevel help(int minor, int serious, bool any = true) {
    return classify_helpfulness(IssueTally{minor, serious, any, 20});
}

} // namespace

TEST_CASE("helpfulness levels follow the issue counts") {
    CHECK(help(0, 0) == HelpfulnessLevel::VeryHelpful);
    CHECK(help(2, 0) == HelpfulnessLevel::Helpful);
    CHECK(help(4, 0) == HelpfulnessLevel::MostlyHelpful);
    CHECK(help(0, 2) == HelpfulnessLevel::MostlyHelpful);
    CHECK(help(6, 0) == HelpfulnessLevel::SomewhatHelpful);
    CHECK(help(0, 3) == HelpfulnessLevel::SomewhatHelpful);
    CHECK(help(0, 0, false) == HelpfulnessLevel::NotAtAllHelpful);
    CHECK_THROWS_AS(validate(IssueTally{-1, 0, true, 3}), ValidationError);
    CHECK_THROWS_AS(validate(IssueTally{2, 2, true, 3}), ValidationError);
    CHECK_THROWS_AS(validate(IssueTally{0, 0, true, 0}), ValidationError);
}

TEST_CASE("classifiers are monotone in the issue counts") {
    for (int minor = 0; minor <= 8; ++minor) {
        for (int serious = 0; serious <= 8; ++serious) {
            auto here = static_cast<int>(help(minor, serious));
            CHECK(static_cast<int>(help(minor + 1, serious)) >= here);
            CHECK(static_cast<int>(help(minor, serious + 1)) >= here);
            auto c = static_cast<int>(classify_comprehensiveness(minor, serious));
            CHECK(static_cast<int>(classify_comprehensiveness(minor + 1, serious)) >= c);
            CHECK(static_cast<int>(classify_comprehensiveness(minor, serious + 1)) >= c);
        }
    }
}

TEST_CASE("comprehensiveness levels") {
    CHECK(classify_comprehensiveness(0, 0) == ComprehensivenessLevel::VeryComprehensive);
    CHECK(classify_comprehensiveness(0, 4) == ComprehensivenessLevel::Comprehensive);
    CHECK(classify_comprehensiveness(2, 0) == ComprehensivenessLevel::MostlyComprehensive);
    CHECK(classify_comprehensiveness(5, 0) == ComprehensivenessLevel::SomewhatComprehensive);
    CHECK(classify_comprehensiveness(6, 0) == ComprehensivenessLevel::NotAtAllComprehensive);
}

TEST_CASE("side-by-side labels and scores") {
    CHECK(sxs_label(Ordering::A_greater, Ordering::A_greater) == SxsLabel::A_MuchBetter);
    CHECK(sxs_label(Ordering::equal, Ordering::A_greater) == SxsLabel::A_Better);
    CHECK(sxs_label(Ordering::B_greater, Ordering::A_greater) == SxsLabel::B_SlightlyBetter);
    CHECK(sxs_label(Ordering::equal, Ordering::equal) == SxsLabel::AboutTheSame);
    for (int s = -3; s <= 3; ++s) CHECK(sxs_score(label_from_score(s)) == s);
    CHECK(favors_a(SxsLabel::A_SlightlyBetter));
    CHECK_FALSE(favors_a(SxsLabel::AboutTheSame));
    CHECK(favors_b(SxsLabel::B_Better));
    CHECK(parse_ordering(" a ") == Ordering::A_greater);
    CHECK(parse_ordering("Same") == Ordering::equal);
    CHECK_THROWS_AS(parse_ordering("maybe"), ValidationError);
}

TEST_CASE("side-by-side judging averages both orientations") {
    // A judge that always prefers the first report has pure position bias.
    auto biased = fixed("<more_helpful>A</more_helpful><more_comprehensive>A</more_comprehensive>");
    auto r = compare_side_by_side(biased, "q", "x", "y");
    CHECK(r.forward == SxsLabel::A_MuchBetter);
    CHECK(r.swapped == SxsLabel::B_MuchBetter);
    CHECK(r.label == SxsLabel::AboutTheSame);

    JudgeFn prefers_x = [](const std::string&, const std::map<std::string, std::string>& v) {
        auto w = v.at("report_a") == "x" ? "A" : "B";
        return std::string("<more_helpful>") + w + "</more_helpful><more_comprehensive>same</more_comprehensive>";
    };
    CHECK(compare_side_by_side(prefers_x, "q", "x", "y").label == SxsLabel::A_Better);
    CHECK(compare_side_by_side(prefers_x, "q", "y", "x").label == SxsLabel::B_Better);
}

TEST_CASE("rubric raters parse tagged counts") {
    auto h = rate_helpfulness(fixed("<statements>10</statements><any_helpful>yes</any_helpful>"
                                    "<minor_issues>1</minor_issues><serious_issues>0</serious_issues>"),
                              "q", "r");
    CHECK(h.level == HelpfulnessLevel::Helpful);
    CHECK_THROWS_AS(rate_helpfulness(fixed("<statements>1</statements><any_helpful>yes</any_helpful>"
                                           "<minor_issues>3</minor_issues><serious_issues>0</serious_issues>"),
                                     "q", "r"),
                    ValidationError);
    auto c = rate_comprehensiveness(fixed("<major_missing>3</major_missing><minor_missing>1</minor_missing>"), "q", "r");
    CHECK(c.level == ComprehensivenessLevel::SomewhatComprehensive);
    CHECK_THROWS_AS(rate_comprehensiveness(fixed("<major_missing>x</major_missing>"), "q", "r"), ParseError);
}

TEST_CASE("query categorization") {
    CHECK(categorize_query(fixed("<rating>1</rating>"), "q", "a", "r") == QueryCategory::Reasoning);
    CHECK(categorize_query(fixed("<rating>2</rating>"), "q", "a", "r") == QueryCategory::Search);
    CHECK_THROWS_AS(categorize_query(fixed("<rating>3</rating>"), "q", "a", "r"), ValidationError);
    CHECK_THROWS_AS(categorize_query(fixed("no rating"), "q", "a", "r"), ParseError);
}

TEST_CASE("correctness extracts then compares") {
    auto corpus = std::make_shared<SyntheticCorpus>(testsupport::make_corpus(1, 1));
    SimBackend sim(corpus);
    PromptLibrary prompts;
    auto judge = make_judge(sim, prompts);
    auto yes = judge_correctness(judge, "Long discussion.\nAnswer: 42 km", "42 km");
    CHECK(yes.correct);
    CHECK(yes.extracted == "42 km");
    CHECK_FALSE(judge_correctness(judge, "Answer: 41 km", "42 km").correct);
    auto none = judge_correctness(judge, "I cannot tell.", "42 km");
    CHECK_FALSE(none.correct);
    CHECK(none.extraction_failed);
}

TEST_CASE("alignment statistics") {
    auto same = alignment_stats({1, 2, 3}, {1, 2, 3});
    CHECK(same.accuracy == 100.0);
    CHECK(same.correlation == doctest::Approx(1.0));
    auto rev = alignment_stats({1, 2, 3, 4}, {4, 3, 2, 1});
    CHECK(rev.accuracy == 0.0);
    CHECK(rev.correlation == doctest::Approx(-1.0));
    CHECK(alignment_stats({1, 1, 2, 2}, {1, 2, 2, 2}).accuracy == 75.0);
    CHECK(alignment_stats({1, 2, 2, 2}, {1, 1, 2, 2}).accuracy == 75.0);
    CHECK(std::isnan(alignment_stats({1, 1}, {1, 2}).correlation));
    // Tied ranks: average ranks, Pearson over them.
    CHECK(alignment_stats({1, 2, 2, 3}, {1, 3, 2, 4}).correlation == doctest::Approx(0.9486833));
    CHECK_THROWS_AS(alignment_stats({1}, {1}), PreconditionError);
    CHECK_THROWS_AS(alignment_stats({1, 2}, {1, 2, 3}), PreconditionError);
}

TEST_CASE("complexity and novelty counts under the simulated judge") {
    auto corpus = std::make_shared<SyntheticCorpus>(testsupport::make_corpus(2, 3));
    SimBackend sim(corpus);
    PromptLibrary prompts;
    auto judge = make_judge(sim, prompts);
    auto p = [](int id) { return testsupport::planted_phrase(id); };
    CHECK(metrics::question_complexity(judge, "What about " + p(2) + " and " + p(4) + "?") == 2);
    CHECK(metrics::answer_complexity(judge, "- " + p(1) + ".\n- " + p(2) + ".\n- " + p(3) + ".") == 3);
    CHECK(metrics::query_novelty(judge, {"Is " + p(1) + " tied to " + p(2) + "?"}, "And " + p(2) + " with " + p(3) + "?") ==
          1);
    CHECK(metrics::query_novelty(judge, {}, "Both " + p(5) + " and " + p(6) + "?") == 2);
    auto q = "Tell me about " + p(1) + ".";
    CHECK(metrics::query_novelty(judge, {q}, q) == 0);
    CHECK_THROWS_AS(metrics::answer_complexity(judge, ""), PreconditionError);
}

TEST_CASE("complexity replies are validated") {
    CHECK(metrics::question_complexity(fixed("<number>5</number>"), "q") == 5);
    CHECK(metrics::answer_complexity(fixed("<number>0</number>"), "a") == 0);
    CHECK_THROWS_AS(metrics::question_complexity(fixed("<number>-1</number>"), "q"), ValidationError);
    CHECK_THROWS_AS(metrics::question_complexity(fixed("<number>many</number>"), "q"), ParseError);
}

TEST_CASE("report coverage") {
    CHECK(metrics::sentence_coverage("A cat sat. A dog ran. A bird flew.", "A cat sat. A dog ran.") == 0.67);
    CHECK(metrics::sentence_coverage("One. Two.", "One. Two.") == 1.0);
    CHECK(metrics::sentence_coverage("One. Two.", "Three.") == 0.0);
    CHECK(metrics::report_coverage(fixed("<ratio>0.666</ratio>"), "c", "r") == 0.67);
    CHECK_THROWS_AS(metrics::report_coverage(fixed("<ratio>1.5</ratio>"), "c", "r"), ValidationError);
    CHECK_THROWS_AS(metrics::report_coverage(fixed("<ratio>x</ratio>"), "c", "r"), ParseError);
    CHECK_THROWS_AS(metrics::report_coverage(fixed("<ratio>1</ratio>"), " ", "r"), PreconditionError);
}

TEST_CASE("cumulative series") {
    using metrics::MetricSample;
    std::vector<MetricSample> s{{"r", 3, "m", 1}, {"r", 1, "m", 2}, {"r", 2, "m", 3}};
    CHECK(metrics::cumulative_series(s) == std::vector<std::pair<int, double>>{{1, 2}, {2, 5}, {3, 6}});
    CHECK(metrics::cumulative_series({{"r", 4, "m", 7}}) == std::vector<std::pair<int, double>>{{4, 7}});
    CHECK(metrics::cumulative_series({}).empty());
    CHECK_THROWS_AS(metrics::cumulative_series({{"r", 1, "m", 1}, {"r", 2, "n", 1}}), PreconditionError);
    CHECK_THROWS_AS(metrics::cumulative_series({{"r", -1, "m", 1}}), PreconditionError);
    CHECK_THROWS_AS(metrics::cumulative_series({{"r", 1, "m", NAN}}), PreconditionError);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> val(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<MetricSample> xs;
        for (int i = 1; i <= 10; ++i) xs.push_back({"r", i, "m", val(rng)});
        auto series = metrics::cumulative_series(xs);
        for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i].second >= series[i - 1].second);
    }
}

TEST_CASE("novelty percentage series") {
    using metrics::MetricSample;
    std::vector<MetricSample> novelty{{"r", 1, "novelty", 2}, {"r", 2, "novelty", 0}};
    std::vector<MetricSample> complexity{{"r", 1, "question_complexity", 2}, {"r", 2, "question_complexity", 2}};
    CHECK(metrics::novelty_percentage_series(novelty, complexity) ==
          std::vector<std::pair<int, double>>{{1, 100.0}, {2, 50.0}});
}

TEST_CASE("pareto points") {
    auto pts = metrics::pareto_points({{"a", 100.0, 0.5}, {"b", 1.0, 0.2}});
    CHECK(pts[0].log10_seconds == doctest::Approx(2.0));
    CHECK(pts[0].score == 0.5);
    CHECK(pts[1].log10_seconds == 0.0);
    CHECK_THROWS_AS(metrics::pareto_points({{"c", 0.0, 0.1}}), PreconditionError);
}
