#include <doctest.h>

#include <random>

#include "redraft/documents.hpp"
#include "redraft/error.hpp"
#include "redraft/prompts.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

using namespace redraft;

namespace {

std::string random_text(std::mt19937& rng, std::size_t max_len) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz ABC0123456789.,;:!?-_/<>\n\t\"'()[]{}";
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s;
    auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
    return s;
}

} // namespace

TEST_CASE("text helpers") {
    CHECK(text::trim("  a b \n") == "a b");
    CHECK(text::normalize("  Hello   World ") == "hello world");
    CHECK(text::contains_phrase("Solar Import Tariffs rose", "solar import tariffs"));
    CHECK_FALSE(text::contains_phrase("prosolar import tariffs", "solar import tariffs"));
    CHECK(text::split_sentences("One. Two? Three").size() == 3);
    CHECK(text::round_half_away(0.665, 2) == doctest::Approx(0.67));
    CHECK(text::round_half_away(-0.125, 2) == doctest::Approx(-0.13));
    CHECK(text::round_half_away(2.0 / 3.0, 2) == doctest::Approx(0.67));
    CHECK(text::fnv1a("abc") == text::fnv1a("abc"));
    CHECK(text::fnv1a("abc") != text::fnv1a("abd"));
}

TEST_CASE("parse_tagged examples") {
    CHECK(judge::parse_tagged("<rating>2</rating>", "rating") == "2");
    CHECK(judge::parse_tagged("<thinking>x</thinking><number>7</number>", "number") == "7");
    CHECK_THROWS_AS(judge::parse_tagged("no tags here", "rating"), ParseError);
    CHECK_THROWS_AS(judge::parse_tagged("<rating>2", "rating"), ParseError);
    try {
        judge::parse_tagged("nothing", "score");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.subject() == "score");
    }
}

TEST_CASE("parse_tagged takes the pair that closes first and trims") {
    CHECK(judge::parse_tagged("<a> one </a><a>two</a>", "a") == "one");
    CHECK(judge::parse_tagged("<a>x<a>inner</a>", "a") == "inner");
    CHECK(judge::find_all_tagged("<c>1</c> mid <c>2</c>", "c") == std::vector<std::string>{"1", "2"});
    CHECK(judge::find_last_tagged("<c>1</c><c>2</c>", "c") == "2");
}

TEST_CASE("emit then parse recovers tag-free content") {
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        auto content = random_text(rng, 60);
        if (content.find("<score>") != std::string::npos || content.find("</score>") != std::string::npos) continue;
        auto wrapped = random_text(rng, 10) + judge::emit_tagged("score", content) + random_text(rng, 10);
        if (wrapped.find("<score>") != wrapped.rfind("<score>")) continue;
        CHECK(judge::parse_tagged(wrapped, "score") == text::trim(content));
    }
}

TEST_CASE("render_template substitutes once and rejects unknown placeholders") {
    CHECK(render_template("a {x} b", {{"x", "{y}"}, {"y", "no"}}) == "a {y} b");
    CHECK(render_template("json { \"k\": 1 }", {}) == "json { \"k\": 1 }");
    CHECK_THROWS_AS(render_template("{missing}", {}), ConfigError);
}

TEST_CASE("builtin prompt library has every template the pipeline and judges use") {
    PromptLibrary lib;
    for (const char* id : {"plan", "question", "question_with_draft", "answer", "draft", "revise_draft", "report",
                           "fitness", "revise_variant", "coverage_check", "merge", "categorize_query",
                           "question_complexity", "answer_complexity", "query_novelty", "report_coverage",
                           "rate_helpfulness", "rate_comprehensiveness", "sxs", "extract_answer", "compare_answer"}) {
        CHECK_MESSAGE(lib.contains(id), id);
    }
    auto merge = lib.render("merge", {{"query", "Q?"}, {"answer_list", "<candidate>x</candidate>"}});
    CHECK(merge.find("Q?") != std::string::npos);
    CHECK(merge.find("<candidate>x</candidate>") != std::string::npos);
}

TEST_CASE("parse_plan reads numbered areas") {
    auto areas = parse_plan("Intro line\n1. Range: how far\n2) Charging: speed\n- stray bullet\n3. Recycling");
    REQUIRE(areas.size() == 3);
    CHECK(areas[0].index == 1);
    CHECK(areas[0].title == "Range");
    CHECK(areas[0].description == "how far");
    CHECK(areas[1].title == "Charging");
    CHECK(areas[2].title == "Recycling");
    CHECK(parse_plan("no numbers").empty());
}

TEST_CASE("parse_draft splits on level-two headings") {
    auto sections = parse_draft("# Title\nintro\n## 1. A\n- x\n\n## 2. B\n");
    REQUIRE(sections.size() == 2);
    CHECK(sections[0].heading == "1. A");
    CHECK(sections[0].lines == std::vector<std::string>{"- x"});
    CHECK(sections[1].lines.empty());
    CHECK(is_unverified("- (unverified) some claim."));
    CHECK(unverified_claim("- (unverified) some claim.") == "some claim.");
}

TEST_CASE("render_history keeps the last pairs verbatim and digests older questions") {
    std::vector<QAPair> history;
    for (int i = 1; i <= 25; ++i) history.push_back(QAPair{"q" + std::to_string(i), "a" + std::to_string(i), {}, i, 0});
    auto rendered = render_history(history);
    auto qs = history_questions(rendered);
    auto as = history_answers(rendered);
    CHECK(as.size() == 20);
    CHECK(as.front() == "a6");
    CHECK(qs.size() == 25);
    CHECK(rendered.find("q1") != std::string::npos);
    CHECK(render_history({}).find("none yet") != std::string::npos);
}
