#include "redraft/documents.hpp"

#include <cctype>

#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft {

std::vector<PlanArea> parse_plan(std::string_view plan) {
    std::vector<PlanArea> areas;
    for (const auto& raw : text::split_lines(plan)) {
        auto line = text::trim(raw);
        std::size_t i = 0;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) continue;
        auto rest = text::trim(std::string_view(line).substr(i + 1));
        if (rest.empty()) continue;
        rest = text::replace_all(rest, "**", "");
        PlanArea area;
        area.index = std::stoi(line.substr(0, i));
        auto colon = rest.find(':');
        if (colon == std::string::npos) {
            area.title = rest;
        } else {
            area.title = text::trim(std::string_view(rest).substr(0, colon));
            area.description = text::trim(std::string_view(rest).substr(colon + 1));
        }
        if (!area.title.empty()) areas.push_back(std::move(area));
    }
    return areas;
}

std::vector<DraftSection> parse_draft(std::string_view draft) {
    std::vector<DraftSection> sections;
    for (const auto& raw : text::split_lines(draft)) {
        auto line = text::trim(raw);
        if (line.rfind("## ", 0) == 0) {
            sections.push_back(DraftSection{text::trim(std::string_view(line).substr(3)), {}});
            continue;
        }
        if (line.empty() || sections.empty()) continue;
        sections.back().lines.push_back(line);
    }
    return sections;
}

bool is_unverified(std::string_view line) {
    return text::contains_ci(line, kUnverifiedMarker);
}

std::string unverified_claim(std::string_view line) {
    auto s = text::trim(line);
    if (s.rfind("- ", 0) == 0 || s.rfind("* ", 0) == 0) s = text::trim(std::string_view(s).substr(2));
    auto pos = text::to_lower(s).find(kUnverifiedMarker);
    if (pos != std::string::npos) s.erase(pos, kUnverifiedMarker.size());
    return text::trim(s);
}

std::string render_history(const std::vector<QAPair>& history, std::size_t verbatim_limit) {
    std::string out;
    std::size_t first_verbatim = history.size() > verbatim_limit ? history.size() - verbatim_limit : 0;
    if (first_verbatim > 0) {
        out += "<earlier_questions>\n";
        for (std::size_t i = 0; i < first_verbatim; ++i) {
            out += "- " + history[i].question + "\n";
        }
        out += "</earlier_questions>\n";
    }
    for (std::size_t i = first_verbatim; i < history.size(); ++i) {
        const auto& qa = history[i];
        out += "<qa step=\"" + std::to_string(qa.step_index) + "\">\n";
        out += judge::emit_tagged("q", qa.question) + "\n";
        out += judge::emit_tagged("a", qa.answer) + "\n";
        out += "</qa>\n";
    }
    if (out.empty()) out = "(none yet)";
    return out;
}

std::string render_documents(const std::vector<SearchResult>& docs) {
    std::string out;
    for (const auto& d : docs) {
        out += "<document>\n";
        out += "id: " + d.doc_id + "\n";
        out += "title: " + d.title + "\n";
        out += "source: " + d.locator + "\n";
        out += d.snippet + "\n";
        out += "</document>\n";
    }
    return out;
}

std::vector<std::string> history_questions(std::string_view history) {
    auto out = judge::find_all_tagged(history, "q");
    if (auto earlier = judge::find_tagged(history, "earlier_questions")) {
        std::vector<std::string> digest;
        for (const auto& line : text::split_lines(*earlier)) {
            auto t = text::trim(line);
            if (t.rfind("- ", 0) == 0) digest.push_back(t.substr(2));
        }
        out.insert(out.begin(), digest.begin(), digest.end());
    }
    return out;
}

std::vector<std::string> history_answers(std::string_view history) {
    return judge::find_all_tagged(history, "a");
}

} // namespace redraft
