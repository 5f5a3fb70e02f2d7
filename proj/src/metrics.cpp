#include "redraft/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "redraft/error.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft::metrics {

namespace {

int count_reply(const std::string& reply) {
    auto n = judge::parse_int_tag(reply, "number");
    if (n < 0) throw ValidationError("<number> must be non-negative, got " + std::to_string(n));
    return static_cast<int>(n);
}

std::string strip_markers(std::string s) {
    s = text::trim(s);
    while (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '#')) s = text::trim(s.substr(1));
    return text::normalize(s);
}

} // namespace

int question_complexity(const judge::JudgeFn& judge, const std::string& question) {
    if (text::trim(question).empty()) throw PreconditionError("question_complexity needs a non-empty question");
    return count_reply(judge("question_complexity", {{"question", question}}));
}

int answer_complexity(const judge::JudgeFn& judge, const std::string& answer) {
    if (text::trim(answer).empty()) throw PreconditionError("answer_complexity needs a non-empty answer");
    return count_reply(judge("answer_complexity", {{"answer", answer}}));
}

int query_novelty(const judge::JudgeFn& judge, const std::vector<std::string>& used_questions,
                  const std::string& new_question) {
    if (text::trim(new_question).empty()) throw PreconditionError("query_novelty needs a non-empty question");
    std::string list;
    for (const auto& q : used_questions) list += "- " + q + "\n";
    if (list.empty()) list = "(none)";
    return count_reply(judge("query_novelty", {{"question_list", list}, {"new_question", new_question}}));
}

double report_coverage(const judge::JudgeFn& judge, const std::string& context, const std::string& response) {
    if (text::trim(context).empty()) throw PreconditionError("report_coverage needs a non-empty context");
    auto body = judge::parse_tagged(judge("report_coverage", {{"context", context}, {"response", response}}), "ratio");
    double ratio = 0.0;
    try {
        std::size_t used = 0;
        ratio = std::stod(body, &used);
        if (used != body.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ParseError("ratio", "<ratio> does not hold a number: '" + body + "'");
    }
    if (!std::isfinite(ratio) || ratio < 0.0 || ratio > 1.0) {
        throw ValidationError("<ratio> must lie in [0, 1], got " + body);
    }
    return text::round_half_away(ratio, 2);
}

double sentence_coverage(std::string_view context, std::string_view response) {
    std::vector<std::string> sentences;
    for (const auto& line : text::split_lines(context)) {
        for (auto& s : text::split_sentences(line)) {
            auto norm = strip_markers(s);
            if (!norm.empty()) sentences.push_back(std::move(norm));
        }
    }
    if (sentences.empty()) return 0.0;
    auto haystack = text::normalize(response);
    std::size_t covered = 0;
    for (const auto& s : sentences) covered += haystack.find(s) != std::string::npos ? 1 : 0;
    return text::round_half_away(static_cast<double>(covered) / static_cast<double>(sentences.size()), 2);
}

std::string_view to_string(Method method) {
    switch (method) {
    case Method::backbone: return "backbone";
    case Method::self_evolution: return "self_evolution";
    case Method::denoising: return "denoising";
    }
    return "backbone";
}

Method method_from_mode(std::string_view mode) {
    if (mode == "backbone") return Method::backbone;
    if (mode == "evolution" || mode == "self_evolution") return Method::self_evolution;
    if (mode == "denoising") return Method::denoising;
    throw ParseError("mode", "unknown run mode '" + std::string(mode) + "'");
}

std::vector<std::pair<int, double>> cumulative_series(std::vector<MetricSample> samples) {
    for (const auto& s : samples) {
        if (s.metric != samples.front().metric) {
            throw PreconditionError("cumulative_series got mixed metrics '" + samples.front().metric + "' and '" +
                                    s.metric + "'");
        }
        if (s.step < 0) throw PreconditionError("metric sample with negative step");
        if (!std::isfinite(s.value)) throw PreconditionError("metric sample with non-finite value");
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const MetricSample& a, const MetricSample& b) { return a.step < b.step; });
    std::vector<std::pair<int, double>> out;
    double total = 0.0;
    for (const auto& s : samples) {
        total += s.value;
        out.emplace_back(s.step, total);
    }
    return out;
}

std::vector<std::pair<int, double>> novelty_percentage_series(const std::vector<MetricSample>& novelty,
                                                              const std::vector<MetricSample>& complexity) {
    auto fresh = cumulative_series(novelty);
    auto asked = cumulative_series(complexity);
    if (fresh.size() != asked.size()) {
        throw PreconditionError("novelty and complexity series cover different steps");
    }
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        if (fresh[i].first != asked[i].first) {
            throw PreconditionError("novelty and complexity series cover different steps");
        }
        double pct = asked[i].second > 0.0 ? 100.0 * fresh[i].second / asked[i].second : 0.0;
        out.emplace_back(fresh[i].first, pct);
    }
    return out;
}

std::vector<ParetoPoint> pareto_points(const std::vector<RunTiming>& runs) {
    std::vector<ParetoPoint> out;
    for (const auto& r : runs) {
        if (!(r.total_seconds > 0.0)) {
            throw PreconditionError("run '" + r.run_id + "' has a non-positive duration");
        }
        out.push_back(ParetoPoint{r.run_id, std::log10(r.total_seconds), r.score});
    }
    return out;
}

} // namespace redraft::metrics
