#include "redraft/state.hpp"

#include <set>

#include "redraft/error.hpp"

namespace redraft {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(path + key, "missing field '" + path + key + "'");
    }
    return j.at(key);
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
    const auto& v = require(j, key, path);
    if (!v.is_string()) throw ParseError(path + key, "field '" + path + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t require_int(const json& j, const std::string& key, const std::string& path) {
    const auto& v = require(j, key, path);
    if (!v.is_number_integer()) {
        throw ParseError(path + key, "field '" + path + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

std::optional<std::string> optional_string(const json& j, const std::string& key,
                                           const std::string& path) {
    const auto& v = require(j, key, path);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) {
        throw ParseError(path + key, "field '" + path + key + "' must be a string or null");
    }
    return v.get<std::string>();
}

std::optional<Report> optional_report(const json& record, const std::string& key) {
    const auto& v = require(record, key, "");
    if (v.is_null()) return std::nullopt;
    Report r;
    r.body = require_string(v, "body", key + ".");
    auto rev = require_int(v, "revision_index", key + ".");
    if (rev < 0) throw ParseError(key + ".revision_index", "revision_index must be non-negative");
    r.revision_index = static_cast<int>(rev);
    return r;
}

} // namespace

json to_json(const SearchResult& r) {
    return json{{"doc_id", r.doc_id}, {"title", r.title}, {"snippet", r.snippet}, {"locator", r.locator}};
}

json to_json(const QAPair& qa) {
    json sources = json::array();
    for (const auto& s : qa.sources) sources.push_back(to_json(s));
    return json{{"question", qa.question},
                {"answer", qa.answer},
                {"sources", std::move(sources)},
                {"step_index", qa.step_index},
                {"elapsed_ms", qa.elapsed_ms}};
}

json to_json(const Report& r) {
    return json{{"body", r.body}, {"revision_index", r.revision_index}};
}

json snapshot(const ResearchState& state) {
    json history = json::array();
    for (const auto& qa : state.qa_history) history.push_back(to_json(qa));
    return json{{"schema_version", kSchemaVersion},
                {"query", state.query},
                {"plan", state.plan ? json(*state.plan) : json(nullptr)},
                {"qa_history", std::move(history)},
                {"draft", state.draft ? to_json(*state.draft) : json(nullptr)},
                {"step", state.step},
                {"config_snapshot", state.config_snapshot},
                {"pending_question",
                 state.pending_question ? json(*state.pending_question) : json(nullptr)},
                {"final_report", state.final_report ? to_json(*state.final_report) : json(nullptr)}};
}

std::string snapshot_line(const ResearchState& state) {
    return snapshot(state).dump();
}

SearchResult search_result_from_json(const json& j, const std::string& path) {
    SearchResult r;
    r.doc_id = require_string(j, "doc_id", path);
    r.title = require_string(j, "title", path);
    r.snippet = require_string(j, "snippet", path);
    r.locator = require_string(j, "locator", path);
    return r;
}

ResearchState restore(const json& record) {
    if (!record.is_object()) throw ParseError("record", "snapshot record must be an object");
    auto version = require_int(record, "schema_version", "");
    if (version != kSchemaVersion) {
        throw ParseError("schema_version",
                         "unsupported schema_version " + std::to_string(version));
    }

    ResearchState s;
    s.query = require_string(record, "query", "");
    s.plan = optional_string(record, "plan", "");

    const auto& history = require(record, "qa_history", "");
    if (!history.is_array()) throw ParseError("qa_history", "field 'qa_history' must be an array");
    std::optional<int> previous_index;
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto path = "qa_history[" + std::to_string(i) + "].";
        const auto& item = history[i];
        QAPair qa;
        qa.question = require_string(item, "question", path);
        qa.answer = require_string(item, "answer", path);
        const auto& sources = require(item, "sources", path);
        if (!sources.is_array()) throw ParseError(path + "sources", "field '" + path + "sources' must be an array");
        std::set<std::string> ids;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            auto src = search_result_from_json(sources[k], path + "sources[" + std::to_string(k) + "].");
            if (!ids.insert(src.doc_id).second) {
                throw ParseError(path + "sources", "duplicate doc_id '" + src.doc_id + "'");
            }
            qa.sources.push_back(std::move(src));
        }
        qa.step_index = static_cast<int>(require_int(item, "step_index", path));
        if (previous_index && qa.step_index <= *previous_index) {
            throw ParseError(path + "step_index", "step_index values must be strictly increasing");
        }
        previous_index = qa.step_index;
        qa.elapsed_ms = require_int(item, "elapsed_ms", path);
        if (qa.elapsed_ms < 0) throw ParseError(path + "elapsed_ms", "elapsed_ms must be non-negative");
        s.qa_history.push_back(std::move(qa));
    }

    s.draft = optional_report(record, "draft");

    auto step = require_int(record, "step", "");
    if (step < 0) throw ParseError("step", "step must be non-negative");
    s.step = static_cast<int>(step);
    s.config_snapshot = require_string(record, "config_snapshot", "");
    s.pending_question = optional_string(record, "pending_question", "");
    s.final_report = optional_report(record, "final_report");
    return s;
}

ResearchState restore_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError("record", std::string("snapshot is not valid JSON: ") + e.what());
    }
    return restore(j);
}

} // namespace redraft
