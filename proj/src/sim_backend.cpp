#include "redraft/sim_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "redraft/documents.hpp"
#include "redraft/error.hpp"
#include "redraft/metrics.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft {

namespace {

using IdSet = std::set<int>;

std::string payload(std::string_view prompt, std::string_view tag) {
    return judge::find_last_tagged(prompt, tag).value_or("");
}

IdSet ids_in(const SyntheticCorpus& corpus, std::string_view text) {
    auto found = corpus.find_key_points(text);
    return IdSet(found.begin(), found.end());
}

// Key points a question asks about: planted phrases plus claims quoted in their noisy form.
IdSet asked_in(const SyntheticCorpus& corpus, std::string_view text) {
    auto ids = ids_in(corpus, text);
    for (const auto& [id, _] : corpus.key_points) {
        if (text.find(corpus.noisy_form(id)) != std::string_view::npos) ids.insert(id);
    }
    return ids;
}

bool warm(const GenerationRequest& r) {
    return r.temperature > 0.0 && r.seed.has_value();
}

std::string bullet(std::string_view body) {
    return "- " + std::string(body) + ".";
}

std::string strip_period(std::string s) {
    while (!s.empty() && (s.back() == '.' || std::isspace(static_cast<unsigned char>(s.back())))) s.pop_back();
    return s;
}

// Title part of a "N. Title" heading.
std::string heading_title(std::string_view heading) {
    auto areas = parse_plan(std::string(heading));
    if (!areas.empty()) return areas.front().title;
    return text::trim(heading);
}

std::optional<int> claim_key_point(const SyntheticCorpus& corpus, std::string_view line) {
    auto claim = strip_period(unverified_claim(line));
    for (const auto& [id, _] : corpus.key_points) {
        if (corpus.noisy_form(id) == claim) return id;
    }
    return std::nullopt;
}

std::string query_of(const GenerationRequest& r) {
    auto q = payload(r.prompt, "query");
    if (!q.empty()) return q;
    auto colon = r.prompt.find(':');
    if (colon != std::string::npos) return text::trim(std::string_view(r.prompt).substr(colon + 1));
    return text::trim(r.prompt);
}

std::vector<PlanArea> plan_areas(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto areas = parse_plan(payload(r.prompt, "plan"));
    if (!areas.empty()) return areas;
    for (std::size_t i = 0; i < corpus.sections.size(); ++i) {
        areas.push_back(PlanArea{static_cast<int>(i + 1), corpus.sections[i].title, corpus.sections[i].description});
    }
    return areas;
}

std::string sim_plan(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    std::string out;
    for (std::size_t i = 0; i < corpus.sections.size(); ++i) {
        const auto& s = corpus.sections[i];
        out += std::to_string(i + 1) + ". " + s.title + ": " + s.description + "\n";
    }
    if (warm(r) && !corpus.key_points.empty()) {
        auto it = corpus.key_points.begin();
        std::advance(it, static_cast<long>(*r.seed % corpus.key_points.size()));
        out += bullet(it->second) + "\n";
    }
    if (out.empty()) out = "1. " + query_of(r) + ": background and current state\n";
    return out;
}

struct QuestionTarget {
    PlanArea area;
    std::optional<std::string> claim;
};

std::optional<QuestionTarget> gap_target(const GenerationRequest& r, const std::vector<PlanArea>& areas) {
    auto gaps = payload(r.prompt, "gaps");
    for (const auto& line : text::split_lines(gaps)) {
        auto parsed = parse_plan(text::trim(line).rfind("- ", 0) == 0 ? text::trim(line).substr(2) : line);
        if (parsed.empty()) continue;
        const PlanArea* area = nullptr;
        for (const auto& a : areas) {
            if (a.index == parsed.front().index) area = &a;
        }
        if (!area) continue;
        QuestionTarget target{*area, std::nullopt};
        for (const auto& section : parse_draft(payload(r.prompt, "draft"))) {
            if (text::normalize(heading_title(section.heading)) != text::normalize(area->title)) continue;
            for (const auto& l : section.lines) {
                if (is_unverified(l)) {
                    target.claim = strip_period(unverified_claim(l));
                    break;
                }
            }
        }
        return target;
    }
    return std::nullopt;
}

std::string sim_question(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto areas = plan_areas(r, corpus);
    if (areas.empty()) return "What does the evidence say about " + query_of(r) + "?";
    auto target = gap_target(r, areas);
    if (!target) {
        auto asked = history_questions(payload(r.prompt, "history"));
        for (const auto& a : areas) {
            bool seen = std::any_of(asked.begin(), asked.end(),
                                    [&](const std::string& q) { return text::contains_ci(q, a.title); });
            if (!seen) {
                target = QuestionTarget{a, std::nullopt};
                break;
            }
        }
        if (!target) target = QuestionTarget{areas.back(), std::nullopt};
    }
    std::string q = "What does the evidence say about " + target->area.title + "?";
    if (target->claim && !target->claim->empty()) q += " Verify the claim: " + *target->claim + ".";

    // A claim-directed question stays focused; an open question lists key points the
    // plan names (or the model recalls) that no answer has confirmed yet.
    std::vector<int> include;
    auto plan = payload(r.prompt, "plan");
    auto si = target->claim ? std::nullopt : corpus.section_by_title(target->area.title);
    if (si) {
        auto known = corpus.find_key_points(text::join(history_answers(payload(r.prompt, "history")), "\n"));
        auto unknown = [&](int kp) { return std::find(known.begin(), known.end(), kp) == known.end(); };
        const auto& kps = corpus.sections[*si].key_points;
        for (int kp : kps) {
            if (unknown(kp) && text::contains_phrase(plan, corpus.phrase(kp))) include.push_back(kp);
        }
        if (warm(r) && !kps.empty()) {
            int recalled = kps[*r.seed % kps.size()];
            if (unknown(recalled) && std::find(include.begin(), include.end(), recalled) == include.end()) {
                include.push_back(recalled);
            }
        }
    }
    if (!include.empty()) {
        std::vector<std::string> phrases;
        for (int kp : include) phrases.push_back(corpus.phrase(kp));
        q += " Include: " + text::join(phrases, "; ") + ".";
    }
    return q;
}

std::string sim_answer(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    std::string out;
    for (const auto& block : judge::find_all_tagged(payload(r.prompt, "documents"), "document")) {
        std::string id;
        for (const auto& line : text::split_lines(block)) {
            if (line.rfind("id: ", 0) == 0) {
                id = text::trim(std::string_view(line).substr(4));
                break;
            }
        }
        for (int kp : corpus.find_key_points(block)) {
            out += "- [" + id + "] " + corpus.phrase(kp) + ".\n";
        }
    }
    if (out.empty()) return "The retrieved documents contain no specific findings for this question.";
    return out;
}

std::string sim_draft(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    std::string out = "# Draft report: " + query_of(r) + "\n";
    for (const auto& a : plan_areas(r, corpus)) {
        out += "\n## " + std::to_string(a.index) + ". " + a.title + "\n";
        std::vector<int> hinted;
        if (auto si = corpus.section_by_title(a.title)) {
            for (int kp : corpus.sections[*si].key_points) {
                if (corpus.draft_hints.count(kp)) hinted.push_back(kp);
            }
        }
        for (int kp : hinted) {
            out += bullet(std::string(kUnverifiedMarker) + " " + corpus.noisy_form(kp)) + "\n";
        }
        if (hinted.empty()) {
            out += bullet(std::string(kUnverifiedMarker) + " Details on " + a.title + " are still to be researched") +
                   "\n";
        }
    }
    return out;
}

// Draft revision: keep verified lines, add answered key points to their sections,
// retire unverified claims once their key point is confirmed.
std::string sim_revise_draft(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto draft = payload(r.prompt, "draft");
    IdSet answered;
    for (const auto& a : history_answers(payload(r.prompt, "history"))) {
        auto ids = ids_in(corpus, a);
        answered.insert(ids.begin(), ids.end());
    }
    IdSet present = ids_in(corpus, draft);
    IdSet verified = present;
    verified.insert(answered.begin(), answered.end());

    std::string header;
    for (const auto& line : text::split_lines(draft)) {
        if (text::trim(line).rfind("## ", 0) == 0) break;
        if (!text::trim(line).empty()) header += text::trim(line) + "\n";
    }
    auto sections = parse_draft(draft);
    IdSet placed = present;
    std::string out = header;
    DraftSection* extra = nullptr;
    for (auto& s : sections) {
        if (text::normalize(s.heading) == "additional findings") extra = &s;
    }
    for (auto& s : sections) {
        if (&s == extra) continue;
        std::vector<std::string> verified_lines;
        for (const auto& l : s.lines) {
            if (!is_unverified(l)) verified_lines.push_back(l);
        }
        if (auto si = corpus.section_by_title(heading_title(s.heading))) {
            for (int kp : corpus.sections[*si].key_points) {
                if (answered.count(kp) && !placed.count(kp)) {
                    verified_lines.push_back(bullet(corpus.phrase(kp)));
                    placed.insert(kp);
                }
            }
        }
        std::vector<std::string> kept;
        for (const auto& l : s.lines) {
            if (!is_unverified(l)) continue;
            auto kp = claim_key_point(corpus, l);
            if (kp ? verified.count(*kp) > 0 : !verified_lines.empty()) continue;
            kept.push_back(l);
        }
        out += "\n## " + s.heading + "\n";
        for (const auto& l : verified_lines) out += l + "\n";
        for (const auto& l : kept) out += l + "\n";
    }
    std::vector<std::string> extra_lines = extra ? extra->lines : std::vector<std::string>{};
    for (int kp : answered) {
        if (!placed.count(kp)) extra_lines.push_back(bullet(corpus.phrase(kp)));
    }
    if (!extra_lines.empty()) {
        out += "\n## Additional findings\n";
        for (const auto& l : extra_lines) out += l + "\n";
    }
    return out;
}

std::string sim_report(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    IdSet found;
    for (const auto& a : history_answers(payload(r.prompt, "history"))) {
        auto ids = ids_in(corpus, a);
        found.insert(ids.begin(), ids.end());
    }
    auto draft_ids = ids_in(corpus, payload(r.prompt, "draft"));
    found.insert(draft_ids.begin(), draft_ids.end());
    if (warm(r) && !corpus.key_points.empty()) {
        auto it = corpus.key_points.begin();
        std::advance(it, static_cast<long>(*r.seed % corpus.key_points.size()));
        found.insert(it->first);
    }

    std::string out = "# Report: " + query_of(r) + "\n";
    IdSet placed;
    for (const auto& a : plan_areas(r, corpus)) {
        out += "\n## " + std::to_string(a.index) + ". " + a.title + "\n";
        bool any = false;
        if (auto si = corpus.section_by_title(a.title)) {
            for (int kp : corpus.sections[*si].key_points) {
                if (!found.count(kp) || placed.count(kp)) continue;
                out += bullet(corpus.phrase(kp)) + "\n";
                placed.insert(kp);
                any = true;
            }
        }
        if (!any) out += "No findings were gathered for this area.\n";
    }
    std::string extra;
    for (int kp : found) {
        if (!placed.count(kp)) extra += bullet(corpus.phrase(kp)) + "\n";
    }
    if (!extra.empty()) out += "\n## Additional findings\n" + extra;
    return out;
}

std::string append_missing(std::string content, const IdSet& wanted, const SyntheticCorpus& corpus) {
    auto have = ids_in(corpus, content);
    for (int kp : wanted) {
        if (!have.count(kp)) content += "\n" + bullet(corpus.phrase(kp));
    }
    return content;
}

std::string sim_revise_variant(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    return append_missing(payload(r.prompt, "content"), ids_in(corpus, payload(r.prompt, "critiques")), corpus);
}

std::string sim_merge(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto candidates = judge::find_all_tagged(payload(r.prompt, "answer_list"), "candidate");
    if (candidates.empty()) throw PreconditionError("merge prompt lists no candidates");
    IdSet all;
    for (const auto& c : candidates) {
        auto ids = ids_in(corpus, c);
        all.insert(ids.begin(), ids.end());
    }
    return append_missing(candidates.front(), all, corpus);
}

std::string number_reply(std::string_view tag, long long n) {
    return "<thinking>Counted planted key points.</thinking>\n" + judge::emit_tagged(tag, std::to_string(n));
}

std::string judge_fitness(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto content = payload(r.prompt, "content");
    auto have = ids_in(corpus, content);
    std::string out = "<thinking>Counted planted key points.</thinking>\n" +
                      judge::emit_tagged("score", std::to_string(have.size())) + "\n";
    std::optional<int> missing;
    for (const auto& s : corpus.sections) {
        if (!text::contains_ci(content, s.title)) continue;
        for (int kp : s.key_points) {
            if (!have.count(kp) && (!missing || kp < *missing)) missing = kp;
        }
    }
    if (!missing) {
        for (const auto& [id, _] : corpus.key_points) {
            if (!have.count(id)) {
                missing = id;
                break;
            }
        }
    }
    if (missing) out += judge::emit_tagged("critique", "Missing key point: " + corpus.phrase(*missing)) + "\n";
    return out;
}

std::string judge_coverage_check(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto asked = history_questions(payload(r.prompt, "history"));
    bool covered = true;
    for (const auto& a : plan_areas(r, corpus)) {
        covered = covered && std::any_of(asked.begin(), asked.end(), [&](const std::string& q) {
                      return text::contains_ci(q, a.title);
                  });
    }
    return "<thinking>Checked each plan area.</thinking>\n" + judge::emit_tagged("covered", covered ? "yes" : "no");
}

std::string judge_novelty(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    IdSet used;
    auto list = payload(r.prompt, "question_list");
    auto ids = asked_in(corpus, list);
    used.insert(ids.begin(), ids.end());
    long long fresh = 0;
    for (int kp : asked_in(corpus, payload(r.prompt, "new_question"))) fresh += used.count(kp) ? 0 : 1;
    return number_reply("number", fresh);
}

std::string judge_report_coverage(const GenerationRequest& r) {
    double ratio = metrics::sentence_coverage(payload(r.prompt, "context"), payload(r.prompt, "response"));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", ratio);
    return "<thinking>Checked each context sentence.</thinking>\n" + judge::emit_tagged("ratio", buf);
}

std::string judge_categorize(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto query = payload(r.prompt, "query");
    bool needs_search = !corpus.find_key_points(query).empty();
    for (const auto& s : corpus.sections) needs_search = needs_search || text::contains_ci(query, s.title);
    return "<thinking>Checked whether the query needs corpus facts.</thinking>\n" +
           judge::emit_tagged("rating", needs_search ? "2" : "1");
}

std::string judge_extract(const GenerationRequest& r) {
    std::string found = "None";
    for (const auto& line : text::split_lines(payload(r.prompt, "response"))) {
        auto t = text::trim(line);
        if (text::starts_with_ci(t, "answer:")) found = text::trim(std::string_view(t).substr(7));
    }
    if (found.empty()) found = "None";
    return judge::emit_tagged("extracted_answer", found);
}

std::string judge_compare(const GenerationRequest& r) {
    bool same = text::normalize(payload(r.prompt, "reference")) == text::normalize(payload(r.prompt, "extracted"));
    return "<thinking>Compared normalized strings.</thinking>\n" + judge::emit_tagged("correct", same ? "yes" : "no");
}

struct ReportShape {
    int statements = 0;
    int unverified = 0;
};

ReportShape shape_of(std::string_view report) {
    ReportShape s;
    for (const auto& line : text::split_lines(report)) {
        auto t = text::trim(line);
        if (t.rfind("- ", 0) != 0) continue;
        ++s.statements;
        if (is_unverified(t)) ++s.unverified;
    }
    return s;
}

std::string judge_helpfulness(const GenerationRequest& r) {
    auto report = payload(r.prompt, "report");
    auto s = shape_of(report);
    int statements = s.statements;
    if (statements == 0) statements = std::max<int>(1, static_cast<int>(text::split_sentences(report).size()));
    bool any = s.statements > s.unverified;
    return "<thinking>Unverified claims count as minor issues.</thinking>\n" +
           judge::emit_tagged("statements", std::to_string(statements)) + "\n" +
           judge::emit_tagged("any_helpful", any ? "yes" : "no") + "\n" +
           judge::emit_tagged("minor_issues", std::to_string(s.unverified)) + "\n" +
           judge::emit_tagged("serious_issues", "0");
}

std::string judge_comprehensiveness(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto have = ids_in(corpus, payload(r.prompt, "report"));
    int major = 0;
    int minor = 0;
    for (const auto& s : corpus.sections) {
        int covered = 0;
        for (int kp : s.key_points) covered += have.count(kp) ? 1 : 0;
        if (covered == 0 && !s.key_points.empty()) {
            ++major;
        } else {
            minor += static_cast<int>(s.key_points.size()) - covered;
        }
    }
    return "<thinking>Missing sections are major, missing points minor.</thinking>\n" +
           judge::emit_tagged("major_missing", std::to_string(major)) + "\n" +
           judge::emit_tagged("minor_missing", std::to_string(minor));
}

std::string judge_sxs(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto a = payload(r.prompt, "report_a");
    auto b = payload(r.prompt, "report_b");
    auto ka = ids_in(corpus, a).size();
    auto kb = ids_in(corpus, b).size();
    auto ua = shape_of(a).unverified;
    auto ub = shape_of(b).unverified;
    auto pick = [](bool a_wins, bool b_wins) { return a_wins ? "A" : (b_wins ? "B" : "same"); };
    return "<thinking>Compared key points and unverified claims.</thinking>\n" +
           judge::emit_tagged("more_helpful", pick(ua < ub, ub < ua)) + "\n" +
           judge::emit_tagged("more_comprehensive", pick(ka > kb, kb > ka));
}

std::string guess_judge_template(std::string_view prompt) {
    static const std::vector<std::pair<std::string, std::string>> markers{
        {"</report_a>", "sxs"},
        {"</new_question>", "query_novelty"}, {"</context>", "report_coverage"},
        {"</rational>", "categorize_query"}, {"</extracted>", "compare_answer"},
        {"</content>", "fitness"},
        {"<covered>", "coverage_check"},     {"<major_missing>", "rate_comprehensiveness"},
        {"<minor_issues>", "rate_helpfulness"}, {"<extracted_answer>", "extract_answer"},
    };
    for (const auto& [marker, id] : markers) {
        if (prompt.find(marker) != std::string_view::npos) return id;
    }
    return {};
}

std::string sim_judge(const GenerationRequest& r, const SyntheticCorpus& corpus) {
    auto id = r.template_id.empty() ? guess_judge_template(r.prompt) : r.template_id;
    if (id == "fitness") return judge_fitness(r, corpus);
    if (id == "coverage_check") return judge_coverage_check(r, corpus);
    if (id == "question_complexity") return number_reply("number", static_cast<long long>(asked_in(corpus, payload(r.prompt, "question")).size()));
    if (id == "answer_complexity") return number_reply("number", static_cast<long long>(ids_in(corpus, payload(r.prompt, "answer")).size()));
    if (id == "query_novelty") return judge_novelty(r, corpus);
    if (id == "report_coverage") return judge_report_coverage(r);
    if (id == "categorize_query") return judge_categorize(r, corpus);
    if (id == "extract_answer") return judge_extract(r);
    if (id == "compare_answer") return judge_compare(r);
    if (id == "rate_helpfulness") return judge_helpfulness(r);
    if (id == "rate_comprehensiveness") return judge_comprehensiveness(r, corpus);
    if (id == "sxs") return judge_sxs(r, corpus);
    throw PreconditionError("simulation judge has no rule for template '" + id + "'");
}

} // namespace

Role resolve_role(const GenerationRequest& request) {
    if (request.role) return *request.role;
    auto t = text::trim(request.prompt);
    auto colon = t.find(':');
    if (colon != std::string::npos && colon > 0) {
        auto token = t.substr(0, colon);
        bool word = std::all_of(token.begin(), token.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
        if (word) {
            if (auto role = role_from_string(text::to_lower(token))) return *role;
            throw PreconditionError("unknown role tag '" + token + "'");
        }
    }
    throw PreconditionError("generation request carries no role tag");
}

namespace {

std::string dispatch(const GenerationRequest& request, const SyntheticCorpus& corpus, Role role) {
    switch (role) {
    case Role::plan:
        return sim_plan(request, corpus);
    case Role::question:
        return sim_question(request, corpus);
    case Role::answer:
        return sim_answer(request, corpus);
    case Role::draft:
        return sim_draft(request, corpus);
    case Role::report:
        return sim_report(request, corpus);
    case Role::revise:
        if (request.template_id == "revise_variant" ||
            (request.template_id.empty() && request.prompt.find("</critiques>") != std::string::npos)) {
            return sim_revise_variant(request, corpus);
        }
        return sim_revise_draft(request, corpus);
    case Role::merge:
        return sim_merge(request, corpus);
    case Role::judge:
        return sim_judge(request, corpus);
    }
    throw PreconditionError("unknown role tag");
}

} // namespace

std::string sim_generate(const GenerationRequest& request, const SyntheticCorpus& corpus, Role role) {
    validate(request);
    return text::trim(dispatch(request, corpus, role));
}

SimBackend::SimBackend(std::shared_ptr<const SyntheticCorpus> corpus, std::shared_ptr<SimulatedClock> clock,
                       SimLatency latency)
    : corpus_(std::move(corpus)), clock_(std::move(clock)), latency_(latency) {
    if (!corpus_) throw ConfigError("simulation backend requires a corpus");
}

std::string SimBackend::generate(const GenerationRequest& request) {
    validate(request);
    auto out = truncate_tokens(sim_generate(request, *corpus_, resolve_role(request)), request.max_output_tokens);
    if (clock_) {
        clock_->advance(latency_.generate_ms +
                        latency_.per_output_token_ms * static_cast<std::int64_t>(count_tokens(out)));
    }
    return out;
}

std::vector<SearchResult> SimBackend::search(std::string_view query, int k) {
    auto results = corpus_->search(query, k);
    if (clock_) clock_->advance(latency_.search_ms);
    return results;
}

void ScriptedGenerator::add_rule(Rule rule) {
    std::lock_guard lock(mutex_);
    rules_.push_back(std::move(rule));
}

void ScriptedGenerator::on_template(std::string template_id, std::string response) {
    add_rule([id = std::move(template_id), response = std::move(response)](
                 const GenerationRequest& r) -> std::optional<std::string> {
        if (r.template_id == id) return response;
        return std::nullopt;
    });
}

void ScriptedGenerator::on_contains(std::string needle, std::string response) {
    add_rule([needle = std::move(needle), response = std::move(response)](
                 const GenerationRequest& r) -> std::optional<std::string> {
        if (r.prompt.find(needle) != std::string::npos) return response;
        return std::nullopt;
    });
}

void ScriptedGenerator::push_response(std::string response) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(response));
}

std::string ScriptedGenerator::generate(const GenerationRequest& request) {
    validate(request);
    std::lock_guard lock(mutex_);
    calls_.push_back(request);
    for (const auto& rule : rules_) {
        if (auto out = rule(request)) return truncate_tokens(*out, request.max_output_tokens);
    }
    if (queue_.empty()) throw MalformedResponseError("scripted generator has no response for this request");
    auto out = std::move(queue_.front());
    queue_.pop_front();
    return truncate_tokens(out, request.max_output_tokens);
}

std::vector<GenerationRequest> ScriptedGenerator::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t count_tokens(std::string_view text) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

std::string truncate_tokens(const std::string& text, int max_tokens) {
    if (max_tokens <= 0) return {};
    int seen = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!space && !in_token) ++seen;
        if (space && in_token && seen == max_tokens) return text.substr(0, i);
        in_token = !space;
    }
    return text;
}

} // namespace redraft
