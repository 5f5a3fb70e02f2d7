#include "redraft/judge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "redraft/error.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft::judge {

JudgeFn make_judge(TextGenerator& generator, const PromptLibrary& prompts) {
    return [&generator, &prompts](const std::string& template_id, const std::map<std::string, std::string>& values) {
        GenerationRequest request;
        request.prompt = prompts.render(template_id, values);
        request.role = Role::judge;
        request.template_id = template_id;
        return generator.generate(request);
    };
}

std::string_view to_string(HelpfulnessLevel level) {
    switch (level) {
    case HelpfulnessLevel::VeryHelpful: return "VeryHelpful";
    case HelpfulnessLevel::Helpful: return "Helpful";
    case HelpfulnessLevel::MostlyHelpful: return "MostlyHelpful";
    case HelpfulnessLevel::SomewhatHelpful: return "SomewhatHelpful";
    case HelpfulnessLevel::NotAtAllHelpful: return "NotAtAllHelpful";
    }
    return "NotAtAllHelpful";
}

std::string_view to_string(ComprehensivenessLevel level) {
    switch (level) {
    case ComprehensivenessLevel::VeryComprehensive: return "VeryComprehensive";
    case ComprehensivenessLevel::Comprehensive: return "Comprehensive";
    case ComprehensivenessLevel::MostlyComprehensive: return "MostlyComprehensive";
    case ComprehensivenessLevel::SomewhatComprehensive: return "SomewhatComprehensive";
    case ComprehensivenessLevel::NotAtAllComprehensive: return "NotAtAllComprehensive";
    }
    return "NotAtAllComprehensive";
}

std::string_view to_string(SxsLabel label) {
    switch (label) {
    case SxsLabel::A_MuchBetter: return "A_MuchBetter";
    case SxsLabel::A_Better: return "A_Better";
    case SxsLabel::A_SlightlyBetter: return "A_SlightlyBetter";
    case SxsLabel::AboutTheSame: return "AboutTheSame";
    case SxsLabel::B_SlightlyBetter: return "B_SlightlyBetter";
    case SxsLabel::B_Better: return "B_Better";
    case SxsLabel::B_MuchBetter: return "B_MuchBetter";
    }
    return "AboutTheSame";
}

std::string_view to_string(Ordering ordering) {
    switch (ordering) {
    case Ordering::A_greater: return "A";
    case Ordering::equal: return "same";
    case Ordering::B_greater: return "B";
    }
    return "same";
}

std::string_view to_string(QueryCategory category) {
    return category == QueryCategory::Reasoning ? "Reasoning" : "Search";
}

void validate(const IssueTally& t) {
    if (t.minor_issues < 0 || t.serious_issues < 0) throw ValidationError("issue counts must be non-negative");
    if (t.statement_count <= 0) throw ValidationError("statement count must be positive");
    if (t.minor_issues + t.serious_issues > t.statement_count) {
        throw ValidationError("more issues than statements");
    }
}

// Checked from the worst level down so that adding an issue never improves the level.
HelpfulnessLevel classify_helpfulness(const IssueTally& t) {
    if (!t.any_helpful) return HelpfulnessLevel::NotAtAllHelpful;
    if (t.serious_issues > 2 || t.minor_issues > 5) return HelpfulnessLevel::SomewhatHelpful;
    if (t.serious_issues >= 1 || t.minor_issues >= 3) return HelpfulnessLevel::MostlyHelpful;
    if (t.minor_issues >= 1) return HelpfulnessLevel::Helpful;
    return HelpfulnessLevel::VeryHelpful;
}

ComprehensivenessLevel classify_comprehensiveness(int major_missing, int minor_missing) {
    if (major_missing < 0 || minor_missing < 0) throw ValidationError("missing-point counts must be non-negative");
    if (major_missing > 5) return ComprehensivenessLevel::NotAtAllComprehensive;
    if (major_missing >= 3) return ComprehensivenessLevel::SomewhatComprehensive;
    if (major_missing >= 1) return ComprehensivenessLevel::MostlyComprehensive;
    if (minor_missing > 0) return ComprehensivenessLevel::Comprehensive;
    return ComprehensivenessLevel::VeryComprehensive;
}

SxsLabel sxs_label(Ordering help, Ordering comp) {
    using O = Ordering;
    if (help == O::A_greater && comp == O::A_greater) return SxsLabel::A_MuchBetter;
    if (help == O::B_greater && comp == O::B_greater) return SxsLabel::B_MuchBetter;
    if ((help == O::A_greater && comp == O::equal) || (help == O::equal && comp == O::A_greater)) {
        return SxsLabel::A_Better;
    }
    if ((help == O::B_greater && comp == O::equal) || (help == O::equal && comp == O::B_greater)) {
        return SxsLabel::B_Better;
    }
    if (help == O::A_greater && comp == O::B_greater) return SxsLabel::A_SlightlyBetter;
    if (help == O::B_greater && comp == O::A_greater) return SxsLabel::B_SlightlyBetter;
    return SxsLabel::AboutTheSame;
}

SxsLabel mirror(SxsLabel label) {
    return label_from_score(-sxs_score(label));
}

Ordering mirror(Ordering o) {
    if (o == Ordering::A_greater) return Ordering::B_greater;
    if (o == Ordering::B_greater) return Ordering::A_greater;
    return Ordering::equal;
}

int sxs_score(SxsLabel label) {
    return 3 - static_cast<int>(label);
}

SxsLabel label_from_score(int score) {
    score = std::clamp(score, -3, 3);
    return static_cast<SxsLabel>(3 - score);
}

bool favors_a(SxsLabel label) {
    return sxs_score(label) > 0;
}

bool favors_b(SxsLabel label) {
    return sxs_score(label) < 0;
}

Ordering parse_ordering(std::string_view text) {
    auto t = text::normalize(text);
    if (t == "a") return Ordering::A_greater;
    if (t == "b") return Ordering::B_greater;
    if (t == "same" || t == "equal") return Ordering::equal;
    throw ValidationError("expected A, B or same, got '" + std::string(text) + "'");
}

long long parse_int_tag(std::string_view reply, std::string_view tag) {
    auto body = parse_tagged(reply, tag);
    try {
        std::size_t used = 0;
        long long v = std::stoll(body, &used);
        if (used != body.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string(tag), "<" + std::string(tag) + "> does not hold an integer: '" + body + "'");
    }
}

bool parse_yes_no(std::string_view reply, std::string_view tag) {
    auto body = text::normalize(parse_tagged(reply, tag));
    if (body == "yes") return true;
    if (body == "no") return false;
    throw ParseError(std::string(tag), "<" + std::string(tag) + "> must be yes or no, got '" + body + "'");
}

HelpfulnessRating rate_helpfulness(const JudgeFn& judge, const std::string& query, const std::string& report) {
    HelpfulnessRating r;
    r.raw = judge("rate_helpfulness", {{"query", query}, {"report", report}});
    r.tally.statement_count = static_cast<int>(parse_int_tag(r.raw, "statements"));
    r.tally.any_helpful = parse_yes_no(r.raw, "any_helpful");
    r.tally.minor_issues = static_cast<int>(parse_int_tag(r.raw, "minor_issues"));
    r.tally.serious_issues = static_cast<int>(parse_int_tag(r.raw, "serious_issues"));
    validate(r.tally);
    r.level = classify_helpfulness(r.tally);
    return r;
}

ComprehensivenessRating rate_comprehensiveness(const JudgeFn& judge, const std::string& query,
                                               const std::string& report) {
    ComprehensivenessRating r;
    r.raw = judge("rate_comprehensiveness", {{"query", query}, {"report", report}});
    r.major_missing = static_cast<int>(parse_int_tag(r.raw, "major_missing"));
    r.minor_missing = static_cast<int>(parse_int_tag(r.raw, "minor_missing"));
    r.level = classify_comprehensiveness(r.major_missing, r.minor_missing);
    return r;
}

namespace {

SxsLabel judge_once(const JudgeFn& judge, const std::string& query, const std::string& first,
                    const std::string& second, std::string& raw) {
    raw = judge("sxs", {{"query", query}, {"report_a", first}, {"report_b", second}});
    auto help = parse_ordering(parse_tagged(raw, "more_helpful"));
    auto comp = parse_ordering(parse_tagged(raw, "more_comprehensive"));
    return sxs_label(help, comp);
}

} // namespace

SideBySide compare_side_by_side(const JudgeFn& judge, const std::string& query, const std::string& report_a,
                                const std::string& report_b) {
    SideBySide out;
    out.forward = judge_once(judge, query, report_a, report_b, out.raw_forward);
    out.swapped = mirror(judge_once(judge, query, report_b, report_a, out.raw_swapped));
    // Integer division truncates toward zero, which sends half-point ties toward AboutTheSame.
    out.label = label_from_score((sxs_score(out.forward) + sxs_score(out.swapped)) / 2);
    return out;
}

QueryCategory parse_category(std::string_view reply) {
    auto body = parse_tagged(reply, "rating");
    if (body == "1") return QueryCategory::Reasoning;
    if (body == "2") return QueryCategory::Search;
    throw ValidationError("<rating> must be 1 or 2, got '" + body + "'");
}

QueryCategory categorize_query(const JudgeFn& judge, const std::string& query, const std::string& answer,
                               const std::string& rationale) {
    if (text::trim(query).empty()) throw PreconditionError("categorize_query needs a non-empty query");
    return parse_category(judge("categorize_query", {{"query", query}, {"answer", answer}, {"rational", rationale}}));
}

Correctness judge_correctness(const JudgeFn& judge, const std::string& response, const std::string& reference) {
    if (text::trim(reference).empty()) throw PreconditionError("judge_correctness needs a non-empty reference");
    Correctness c;
    c.raw_extract = judge("extract_answer", {{"response", response}});
    auto extracted = find_tagged(c.raw_extract, "extracted_answer");
    if (!extracted || extracted->empty() || text::normalize(*extracted) == "none") {
        c.extraction_failed = true;
        return c;
    }
    c.extracted = *extracted;
    c.raw_compare = judge("compare_answer", {{"reference", reference}, {"extracted", c.extracted}});
    c.correct = parse_yes_no(c.raw_compare, "correct");
    return c;
}

namespace {

std::vector<double> ranks(const std::vector<int>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

AlignmentStats alignment_stats(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw PreconditionError("alignment_stats needs equal-length score lists");
    if (a.size() < 2) throw PreconditionError("alignment_stats needs at least two scores");
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) matches += a[i] == b[i] ? 1 : 0;
    AlignmentStats s;
    s.accuracy = 100.0 * static_cast<double>(matches) / static_cast<double>(a.size());
    s.correlation = pearson(ranks(a), ranks(b));
    return s;
}

} // namespace redraft::judge
