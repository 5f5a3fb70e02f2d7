#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redraft/backend.hpp"
#include "redraft/trajectory.hpp"

namespace redraft {

struct CorpusSection {
    std::string title;
    std::string description;
    std::vector<int> key_points;
};

struct CorpusDocument {
    std::string doc_id;
    std::string title;
    std::string text;
    std::string locator;
    std::set<int> key_point_ids;
};

/// Offline research world. Key points are planted phrases embedded verbatim in document
/// text, so coverage, novelty and complexity can be computed exactly.
///
/// Sections double as the plan areas the simulated planner proposes. `draft_hints` lists the
/// key points the simulated model half-knows before searching; they appear in the initial
/// draft as unverified claims that never match the planted phrase exactly.
class SyntheticCorpus {
public:
    std::string topic;
    std::vector<CorpusSection> sections;
    std::map<int, std::string> key_points;
    std::vector<CorpusDocument> documents;
    std::set<int> draft_hints;

    static SyntheticCorpus from_json(const nlohmann::json& j);
    static SyntheticCorpus load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Throws ConfigError when a referenced key point is missing, phrases collide or nest,
    /// a phrase has fewer than two words, doc ids repeat, or a document's text does not
    /// carry exactly its declared key points.
    void validate() const;

    /// Ids of planted phrases present in `text`, ascending.
    std::vector<int> find_key_points(std::string_view text) const;
    const std::string& phrase(int id) const;
    /// Share of all planted key points present in `text`.
    double key_point_coverage(std::string_view text) const;
    std::optional<std::size_t> section_of(int key_point) const;
    std::optional<std::size_t> section_by_title(std::string_view title) const;
    const CorpusDocument* document(std::string_view doc_id) const;

    /// Words of the phrase separated by " / ": shares its terms, never matches it.
    std::string noisy_form(int key_point) const;

    /// Term-overlap ranking: score = distinct non-stopword query terms found in title+text.
    /// Zero-score documents are dropped; ties keep corpus order.
    std::vector<SearchResult> search(std::string_view query, int k) const;
};

/// Deterministic costs charged to the simulated clock.
struct SimLatency {
    std::int64_t generate_ms = 400;
    std::int64_t per_output_token_ms = 2;
    std::int64_t search_ms = 250;
};

/// Template-driven generation over a corpus. Pure function of (request, corpus, role).
/// Throws PreconditionError for a role it has no rule for.
std::string sim_generate(const GenerationRequest& request, const SyntheticCorpus& corpus, Role role);

/// Role from the request tag, else from a leading directive token such as "PLAN:".
Role resolve_role(const GenerationRequest& request);

class SimBackend final : public TextGenerator, public SearchProvider {
public:
    explicit SimBackend(std::shared_ptr<const SyntheticCorpus> corpus,
                        std::shared_ptr<SimulatedClock> clock = nullptr, SimLatency latency = {});

    std::string generate(const GenerationRequest& request) override;
    std::vector<SearchResult> search(std::string_view query, int k) override;

    const SyntheticCorpus& corpus() const { return *corpus_; }

private:
    std::shared_ptr<const SyntheticCorpus> corpus_;
    std::shared_ptr<SimulatedClock> clock_;
    SimLatency latency_;
};

/// Canned responses for tests and scripted judges. Rules are tried in insertion order,
/// then the FIFO queue. Records every request it sees.
class ScriptedGenerator final : public TextGenerator {
public:
    using Rule = std::function<std::optional<std::string>(const GenerationRequest&)>;

    void add_rule(Rule rule);
    void on_template(std::string template_id, std::string response);
    void on_contains(std::string needle, std::string response);
    void push_response(std::string response);

    std::string generate(const GenerationRequest& request) override;
    std::vector<GenerationRequest> calls() const;

private:
    mutable std::mutex mutex_;
    std::vector<Rule> rules_;
    std::deque<std::string> queue_;
    std::vector<GenerationRequest> calls_;
};

/// Truncates `text` after its `max_tokens`-th whitespace-separated token.
std::string truncate_tokens(const std::string& text, int max_tokens);
std::size_t count_tokens(std::string_view text);

} // namespace redraft
