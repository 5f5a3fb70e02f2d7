#pragma once

#include <string>
#include <utility>
#include <vector>

#include "redraft/judge.hpp"

// Analysis metrics over completed runs: complexity, novelty, coverage, cumulative curves
// and latency/quality points.
namespace redraft::metrics {

/// Key points in a search question, counted by the judge (`<number>` tag).
/// Throws PreconditionError for an empty question, ParseError or ValidationError for bad replies.
int question_complexity(const judge::JudgeFn& judge, const std::string& question);
int answer_complexity(const judge::JudgeFn& judge, const std::string& answer);

/// Key points of `new_question` not covered by any of `used_questions`.
int query_novelty(const judge::JudgeFn& judge, const std::vector<std::string>& used_questions,
                  const std::string& new_question);

/// Fraction of `context` sentences covered by `response`, as reported by the judge in `<ratio>`.
/// Validated to [0, 1] and rounded half away from zero to two decimals.
double report_coverage(const judge::JudgeFn& judge, const std::string& context, const std::string& response);

/// Exact containment oracle: share of context sentences whose normalized text occurs in the
/// normalized response. List markers and heading hashes are ignored. Rounded to two decimals.
double sentence_coverage(std::string_view context, std::string_view response);

enum class Method { backbone, self_evolution, denoising };
std::string_view to_string(Method method);
Method method_from_mode(std::string_view mode);

struct MetricSample {
    std::string run_id;
    int step = 0;
    std::string metric;
    double value = 0.0;
    Method method = Method::backbone;
};

/// Prefix sums ordered by step. Throws PreconditionError when metric names differ,
/// a step is negative, or a value is not finite.
std::vector<std::pair<int, double>> cumulative_series(std::vector<MetricSample> samples);

/// Cumulative novel key points as a percentage of cumulative question key points, per step.
/// Steps where no key point has been asked yet report 0.
std::vector<std::pair<int, double>> novelty_percentage_series(const std::vector<MetricSample>& novelty,
                                                              const std::vector<MetricSample>& complexity);

struct RunTiming {
    std::string run_id;
    double total_seconds = 0.0;
    double score = 0.0;
};

struct ParetoPoint {
    std::string run_id;
    double log10_seconds = 0.0;
    double score = 0.0;
};

/// One point per run; throws PreconditionError for a non-positive duration.
std::vector<ParetoPoint> pareto_points(const std::vector<RunTiming>& runs);

} // namespace redraft::metrics
