#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redraft/backbone.hpp"
#include "redraft/config.hpp"
#include "redraft/error.hpp"
#include "redraft/http_backend.hpp"
#include "redraft/judge.hpp"
#include "redraft/metrics.hpp"
#include "redraft/prompts.hpp"
#include "redraft/sim_backend.hpp"

// Operator commands behind the `redraft` verbs. Each throws the error taxonomy;
// the executable maps error kinds to exit codes.
namespace redraft {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int backend = 3;
inline constexpr int parse = 4;
inline constexpr int internal = 5;
inline constexpr int halted = 6;
} // namespace exit_code

int exit_code_for(ErrorKind kind);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::string> query;
};

/// Loads the config file, applies command-line overrides and validates.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Providers for one run. Simulation runs share a SimulatedClock with the backend;
/// live runs use wall-clock time.
struct Backends {
    std::shared_ptr<Clock> clock;
    std::shared_ptr<const SyntheticCorpus> corpus;
    std::shared_ptr<SimBackend> sim;
    std::unique_ptr<HttpGenerator> http_generator;
    std::unique_ptr<HttpGenerator> http_judge;
    std::unique_ptr<HttpSearch> http_search;
    TextGenerator* generator = nullptr;
    TextGenerator* judge = nullptr;
    SearchProvider* search = nullptr;
    double fitness_max = 10.0;

    /// Routes HTTP exchange logs into `ctx`'s trajectory.
    void log_into(RunContext& ctx);
};

Backends make_backends(const RunConfig& config);
PromptLibrary make_prompts(const RunConfig& config);

/// Exclusive ownership of an output directory. A lock left by a dead process is taken over.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path path_;
};

struct ResearchOptions {
    std::optional<int> halt_after_step;
    std::ostream* log = nullptr;
};

struct ResearchResult {
    std::filesystem::path output_dir;
    std::string report;
    ResearchState state;
    std::optional<double> score; // planted key-point coverage of the report (simulation only)
    std::int64_t total_ms = 0;
    bool resumed = false;
};

/// Writes report.md, trajectory.jsonl, drafts/step_NNN.md and summary.json under the output
/// directory. An unfinished trajectory is resumed from its last commit; a finished one is replaced.
ResearchResult run_research(const RunConfig& config, const ResearchOptions& options = {});

struct AblationRow {
    Mode mode = Mode::backbone;
    double coverage = 0.0;
    double fitness = 0.0;
    std::int64_t total_ms = 0;
    double log10_seconds = 0.0;
    std::filesystem::path trajectory;
};

struct AblationResult {
    std::uint64_t seed = 0;
    std::vector<AblationRow> rows; // backbone, evolution, denoising
};

/// Runs the three modes with shared seed and corpus into <out>/<mode>/ and writes
/// ablation.json and ablation.tsv.
AblationResult run_ablation(const RunConfig& base, const ResearchOptions& options = {});

struct EvalPair {
    std::string id;
    std::string query;
    judge::SideBySide result;
};

struct EvalSummary {
    std::vector<EvalPair> pairs;
    std::vector<std::string> unmatched;
    int wins = 0;
    int ties = 0;
    int losses = 0;
    double win_rate = 0.0;
};

inline constexpr std::string_view kWinRateDefinition =
    "win rate = 100 * pairs where A is MuchBetter, Better or SlightlyBetter / judged pairs; "
    "ties are AboutTheSame; losses favor B";

/// Pairs reports by id (`<id>.md`, or `<id>/report.md` from research outputs) and judges
/// each pair in both orientations. Writes eval.jsonl and summary.txt into `out_dir`.
EvalSummary run_eval(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                     const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& warnings);

struct RunMetrics {
    std::string run_id;
    metrics::Method method = metrics::Method::backbone;
    std::vector<metrics::MetricSample> samples;
    std::vector<std::pair<int, double>> question_complexity;
    std::vector<std::pair<int, double>> answer_complexity;
    std::vector<std::pair<int, double>> novelty;
    std::vector<std::pair<int, double>> novelty_percentage;
    std::vector<std::pair<int, double>> report_coverage;
    std::optional<metrics::ParetoPoint> pareto;
};

/// Per-step complexity, novelty and coverage for each trajectory plus latency/quality points.
/// Writes metrics.jsonl, metrics.tsv and pareto.tsv into `out_dir`.
std::vector<RunMetrics> run_metrics(const std::vector<std::filesystem::path>& trajectories, const RunConfig& config,
                                    const std::filesystem::path& out_dir);

} // namespace redraft
