#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "redraft/state.hpp"

// Textual shapes shared by the agents and the simulation harness: numbered plans,
// sectioned drafts, and the tagged history / document blocks embedded in prompts.
namespace redraft {

inline constexpr std::string_view kUnverifiedMarker = "(unverified)";

struct PlanArea {
    int index = 0; // 1-based number as written in the plan
    std::string title;
    std::string description;
};

/// Lines of the form "N. Heading: description" (or "N) ..."). Unnumbered lines are ignored.
std::vector<PlanArea> parse_plan(std::string_view plan);

struct DraftSection {
    std::string heading;
    std::vector<std::string> lines; // non-empty body lines
};

/// Splits a markdown draft on "## " headings. Text before the first heading is dropped.
std::vector<DraftSection> parse_draft(std::string_view draft);

bool is_unverified(std::string_view line);

/// Body of an "(unverified)" claim line without bullet and marker.
std::string unverified_claim(std::string_view line);

/// `<qa>` blocks for the given pairs. Pairs older than the last `verbatim_limit`
/// appear only as their question, in an "earlier questions" digest.
std::string render_history(const std::vector<QAPair>& history, std::size_t verbatim_limit = 20);

std::string render_documents(const std::vector<SearchResult>& docs);

/// Questions and answers recovered from a rendered history block.
std::vector<std::string> history_questions(std::string_view history);
std::vector<std::string> history_answers(std::string_view history);

} // namespace redraft
