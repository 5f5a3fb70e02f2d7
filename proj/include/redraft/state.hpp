#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace redraft {

/// Current schema for every line-delimited record this project writes.
inline constexpr int kSchemaVersion = 1;

struct SearchResult {
    std::string doc_id;
    std::string title;
    std::string snippet;
    std::string locator;

    bool operator==(const SearchResult&) const = default;
};

/// One completed search iteration: the question asked and the synthesized answer.
struct QAPair {
    std::string question;
    std::string answer;
    std::vector<SearchResult> sources;
    int step_index = 0;
    std::int64_t elapsed_ms = 0;

    bool operator==(const QAPair&) const = default;
};

struct Report {
    std::string body;
    int revision_index = 0; // 0 is the initial noisy draft

    bool operator==(const Report&) const = default;
};

/// State threaded through every workflow node.
///
/// `qa_history` is append-only. `step` equals `qa_history.size()` at loop boundaries.
/// `pending_question` carries the Stage 2a output to Stage 2b inside one loop body;
/// `final_report` is set by the report stage.
struct ResearchState {
    std::string query;
    std::optional<std::string> plan;
    std::vector<QAPair> qa_history;
    std::optional<Report> draft;
    int step = 0;
    std::string config_snapshot;
    std::optional<std::string> pending_question;
    std::optional<Report> final_report;

    bool operator==(const ResearchState&) const = default;
};

nlohmann::json to_json(const SearchResult& r);
nlohmann::json to_json(const QAPair& qa);
nlohmann::json to_json(const Report& r);

/// Serialized record with `schema_version`; one line of a snapshot file.
nlohmann::json snapshot(const ResearchState& state);
std::string snapshot_line(const ResearchState& state);

/// Inverse of snapshot. Throws ParseError naming the offending field.
ResearchState restore(const nlohmann::json& record);
ResearchState restore_line(std::string_view line);

SearchResult search_result_from_json(const nlohmann::json& j, const std::string& field);

} // namespace redraft
