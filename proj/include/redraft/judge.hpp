#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redraft/backend.hpp"
#include "redraft/prompts.hpp"

// Rubric classifiers, side-by-side labelling and the judge-backed raters built on them.
namespace redraft::judge {

/// Renders `template_id` with `values`, sends it to a judge backend and returns the raw reply.
using JudgeFn = std::function<std::string(const std::string& template_id,
                                          const std::map<std::string, std::string>& values)>;

/// Judge calls without trajectory recording, for tests and offline scoring.
JudgeFn make_judge(TextGenerator& generator, const PromptLibrary& prompts);

enum class HelpfulnessLevel { VeryHelpful, Helpful, MostlyHelpful, SomewhatHelpful, NotAtAllHelpful };
enum class ComprehensivenessLevel {
    VeryComprehensive,
    Comprehensive,
    MostlyComprehensive,
    SomewhatComprehensive,
    NotAtAllComprehensive,
};
enum class SxsLabel {
    A_MuchBetter,
    A_Better,
    A_SlightlyBetter,
    AboutTheSame,
    B_SlightlyBetter,
    B_Better,
    B_MuchBetter,
};
enum class Ordering { A_greater, equal, B_greater };
enum class QueryCategory { Reasoning, Search };

std::string_view to_string(HelpfulnessLevel level);
std::string_view to_string(ComprehensivenessLevel level);
std::string_view to_string(SxsLabel label);
std::string_view to_string(Ordering ordering);
std::string_view to_string(QueryCategory category);

struct IssueTally {
    int minor_issues = 0;
    int serious_issues = 0;
    bool any_helpful = true;
    int statement_count = 1;
};

/// Throws ValidationError for negative counts, a non-positive statement count,
/// or more issues than statements.
void validate(const IssueTally& tally);

HelpfulnessLevel classify_helpfulness(const IssueTally& tally);

/// 3-5 major points map to Somewhat, more than 5 to NotAtAll.
ComprehensivenessLevel classify_comprehensiveness(int major_missing, int minor_missing);

SxsLabel sxs_label(Ordering helpfulness, Ordering comprehensiveness);
SxsLabel mirror(SxsLabel label);
Ordering mirror(Ordering ordering);

/// +3 for A_MuchBetter down to -3 for B_MuchBetter.
int sxs_score(SxsLabel label);
SxsLabel label_from_score(int score);
bool favors_a(SxsLabel label);
bool favors_b(SxsLabel label);

/// "A", "B" or "same", case-insensitive. Throws ValidationError otherwise.
Ordering parse_ordering(std::string_view text);

/// Integer inside `<tag>`. Throws ParseError when the tag is missing or not an integer.
long long parse_int_tag(std::string_view reply, std::string_view tag);

/// "yes"/"no" inside `<tag>`.
bool parse_yes_no(std::string_view reply, std::string_view tag);

struct HelpfulnessRating {
    IssueTally tally;
    HelpfulnessLevel level = HelpfulnessLevel::VeryHelpful;
    std::string raw;
};

struct ComprehensivenessRating {
    int major_missing = 0;
    int minor_missing = 0;
    ComprehensivenessLevel level = ComprehensivenessLevel::VeryComprehensive;
    std::string raw;
};

HelpfulnessRating rate_helpfulness(const JudgeFn& judge, const std::string& query, const std::string& report);
ComprehensivenessRating rate_comprehensiveness(const JudgeFn& judge, const std::string& query,
                                               const std::string& report);

struct SideBySide {
    SxsLabel label = SxsLabel::AboutTheSame;
    SxsLabel forward = SxsLabel::AboutTheSame; // A shown first
    SxsLabel swapped = SxsLabel::AboutTheSame; // B shown first, mapped back to A/B
    std::string raw_forward;
    std::string raw_swapped;
};

/// Judges the pair in both orientations and averages the scores; a half-point tie
/// is rounded toward AboutTheSame.
SideBySide compare_side_by_side(const JudgeFn& judge, const std::string& query, const std::string& report_a,
                                const std::string& report_b);

/// Rating 1 is Reasoning, 2 is Search; anything else is a ValidationError.
QueryCategory parse_category(std::string_view reply);
QueryCategory categorize_query(const JudgeFn& judge, const std::string& query, const std::string& answer,
                               const std::string& rationale);

struct Correctness {
    bool correct = false;
    bool extraction_failed = false;
    std::string extracted;
    std::string raw_extract;
    std::string raw_compare;
};

/// Extract a single answer from `response`, then compare it with `reference`.
/// An answer of "None" (or a reply without the tag) counts as incorrect and sets the flag.
Correctness judge_correctness(const JudgeFn& judge, const std::string& response, const std::string& reference);

struct AlignmentStats {
    double correlation = 0.0; // Spearman rank correlation; NaN when either list is constant
    double accuracy = 0.0;    // percent of exact label matches
    std::string correlation_method = "spearman";
};

/// Throws PreconditionError for length mismatch or fewer than two items.
AlignmentStats alignment_stats(const std::vector<int>& scores_a, const std::vector<int>& scores_b);

} // namespace redraft::judge
