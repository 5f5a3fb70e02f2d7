#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "redraft/error.hpp"
#include "redraft/sim_backend.hpp"
#include "redraft/text.hpp"

namespace redraft {

using nlohmann::json;

namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words{
        "a",     "about",  "an",      "and",    "are",   "as",      "at",     "be",   "by",
        "can",   "claim",  "consider", "does",  "evidence", "find",  "for",    "from", "how",
        "in",    "include", "is",     "it",     "its",   "of",      "on",     "or",   "say",
        "than",  "that",   "the",     "their",  "these", "this",    "to",     "verify", "was",
        "were",  "what",   "which",   "who",    "why",   "will",    "with",   "also",
    };
    return words;
}

std::vector<int> int_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError("corpus field '" + field + "' must be an array of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ConfigError("corpus field '" + field + "' must hold integers");
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

SyntheticCorpus SyntheticCorpus::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("corpus must be a JSON object");
    SyntheticCorpus c;
    c.topic = j.value("topic", "");
    if (!j.contains("key_points") || !j["key_points"].is_object()) {
        throw ConfigError("corpus requires a 'key_points' object mapping id to phrase");
    }
    for (const auto& [id, phrase] : j["key_points"].items()) {
        int key = 0;
        try {
            key = std::stoi(id);
        } catch (const std::exception&) {
            throw ConfigError("corpus key point id '" + id + "' is not an integer");
        }
        if (!phrase.is_string()) throw ConfigError("corpus key point " + id + " must be a string");
        c.key_points[key] = phrase.get<std::string>();
    }
    for (const auto& s : j.value("sections", json::array())) {
        CorpusSection section;
        section.title = s.at("title").get<std::string>();
        section.description = s.value("description", "");
        section.key_points = int_list(s.value("key_points", json::array()), "sections.key_points");
        c.sections.push_back(std::move(section));
    }
    for (const auto& d : j.value("documents", json::array())) {
        CorpusDocument doc;
        doc.doc_id = d.at("doc_id").get<std::string>();
        doc.title = d.value("title", "");
        doc.text = d.at("text").get<std::string>();
        doc.locator = d.value("locator", "sim://" + doc.doc_id);
        auto ids = int_list(d.value("key_points", json::array()), "documents.key_points");
        doc.key_point_ids.insert(ids.begin(), ids.end());
        c.documents.push_back(std::move(doc));
    }
    if (j.contains("draft_hints")) {
        auto hints = int_list(j["draft_hints"], "draft_hints");
        c.draft_hints.insert(hints.begin(), hints.end());
    } else {
        for (const auto& [id, _] : c.key_points) c.draft_hints.insert(id);
    }
    c.validate();
    return c;
}

SyntheticCorpus SyntheticCorpus::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read corpus file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("corpus file " + path.string() + " is not valid JSON: " + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("corpus file " + path.string() + ": " + e.what());
    }
}

json SyntheticCorpus::to_json() const {
    json kps = json::object();
    for (const auto& [id, phrase] : key_points) kps[std::to_string(id)] = phrase;
    json secs = json::array();
    for (const auto& s : sections) {
        secs.push_back({{"title", s.title}, {"description", s.description}, {"key_points", s.key_points}});
    }
    json docs = json::array();
    for (const auto& d : documents) {
        docs.push_back({{"doc_id", d.doc_id},
                        {"title", d.title},
                        {"text", d.text},
                        {"locator", d.locator},
                        {"key_points", std::vector<int>(d.key_point_ids.begin(), d.key_point_ids.end())}});
    }
    return json{{"topic", topic},
                {"sections", secs},
                {"key_points", kps},
                {"documents", docs},
                {"draft_hints", std::vector<int>(draft_hints.begin(), draft_hints.end())}};
}

void SyntheticCorpus::validate() const {
    for (const auto& [id, phrase] : key_points) {
        if (text::tokenize(phrase).size() < 2) {
            throw ConfigError("key point " + std::to_string(id) + " must have at least two words");
        }
        for (const auto& [other_id, other] : key_points) {
            if (other_id == id) continue;
            if (text::to_lower(phrase) == text::to_lower(other)) {
                throw ConfigError("key points " + std::to_string(id) + " and " +
                                  std::to_string(other_id) + " share a phrase");
            }
            if (text::contains_phrase(other, phrase)) {
                throw ConfigError("key point " + std::to_string(id) + " is nested in key point " +
                                  std::to_string(other_id));
            }
        }
    }
    std::set<int> seen_in_sections;
    for (const auto& s : sections) {
        if (s.title.empty()) throw ConfigError("corpus section without a title");
        for (int kp : s.key_points) {
            if (!key_points.count(kp)) {
                throw ConfigError("section '" + s.title + "' references unknown key point " +
                                  std::to_string(kp));
            }
            if (!seen_in_sections.insert(kp).second) {
                throw ConfigError("key point " + std::to_string(kp) + " belongs to two sections");
            }
        }
    }
    std::set<std::string> ids;
    for (const auto& d : documents) {
        if (!ids.insert(d.doc_id).second) throw ConfigError("duplicate doc_id '" + d.doc_id + "'");
        for (int kp : d.key_point_ids) {
            if (!key_points.count(kp)) {
                throw ConfigError("document '" + d.doc_id + "' references unknown key point " +
                                  std::to_string(kp));
            }
        }
        auto found = find_key_points(d.title + "\n" + d.text);
        if (std::set<int>(found.begin(), found.end()) != d.key_point_ids) {
            throw ConfigError("document '" + d.doc_id +
                              "' text does not carry exactly its declared key points");
        }
    }
    for (int h : draft_hints) {
        if (!key_points.count(h)) throw ConfigError("draft hint references unknown key point " + std::to_string(h));
    }
}

std::vector<int> SyntheticCorpus::find_key_points(std::string_view text) const {
    std::vector<int> out;
    for (const auto& [id, phrase] : key_points) {
        if (text::contains_phrase(text, phrase)) out.push_back(id);
    }
    return out;
}

const std::string& SyntheticCorpus::phrase(int id) const {
    auto it = key_points.find(id);
    if (it == key_points.end()) throw PreconditionError("unknown key point " + std::to_string(id));
    return it->second;
}

double SyntheticCorpus::key_point_coverage(std::string_view text) const {
    if (key_points.empty()) return 0.0;
    return static_cast<double>(find_key_points(text).size()) / static_cast<double>(key_points.size());
}

std::optional<std::size_t> SyntheticCorpus::section_of(int key_point) const {
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& kps = sections[i].key_points;
        if (std::find(kps.begin(), kps.end(), key_point) != kps.end()) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> SyntheticCorpus::section_by_title(std::string_view title) const {
    auto wanted = text::normalize(title);
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (text::normalize(sections[i].title) == wanted) return i;
    }
    return std::nullopt;
}

const CorpusDocument* SyntheticCorpus::document(std::string_view doc_id) const {
    for (const auto& d : documents) {
        if (d.doc_id == doc_id) return &d;
    }
    return nullptr;
}

std::string SyntheticCorpus::noisy_form(int key_point) const {
    return text::join(text::tokenize(phrase(key_point)), " / ");
}

std::vector<SearchResult> SyntheticCorpus::search(std::string_view query, int k) const {
    if (k < 0) throw PreconditionError("search k must be non-negative");
    if (k == 0) return {};
    std::set<std::string> terms;
    for (auto& t : text::tokenize(query)) {
        if (!stopwords().count(t)) terms.insert(std::move(t));
    }
    struct Scored {
        std::size_t score;
        std::size_t order;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        auto tokens = text::tokenize(documents[i].title + " " + documents[i].text);
        std::set<std::string> doc_terms(tokens.begin(), tokens.end());
        std::size_t score = 0;
        for (const auto& t : terms) score += doc_terms.count(t);
        if (score > 0) scored.push_back({score, i});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    std::vector<SearchResult> out;
    for (std::size_t i = 0; i < scored.size() && static_cast<int>(out.size()) < k; ++i) {
        const auto& d = documents[scored[i].order];
        out.push_back(SearchResult{d.doc_id, d.title, d.text, d.locator});
    }
    return out;
}

} // namespace redraft
