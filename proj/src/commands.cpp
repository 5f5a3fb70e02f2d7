#include "redraft/commands.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "redraft/denoise.hpp"
#include "redraft/pipeline.hpp"
#include "redraft/tags.hpp"
#include "redraft/text.hpp"

namespace redraft {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::precondition:
        return exit_code::config;
    case ErrorKind::transport:
    case ErrorKind::rate_limit:
    case ErrorKind::malformed_response:
        return exit_code::backend;
    case ErrorKind::parse:
    case ErrorKind::validation:
        return exit_code::parse;
    case ErrorKind::halted:
        return exit_code::halted;
    case ErrorKind::internal:
        break;
    }
    return exit_code::internal;
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.mode) config.mode = mode_from_string(*o.mode);
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.query) config.query = *o.query;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
    auto config = RunConfig::load(path);
    apply_overrides(config, overrides);
    config.validate();
    return config;
}

void Backends::log_into(RunContext& ctx) {
    auto sink = [&ctx](json j) { ctx.record(std::move(j)); };
    if (http_generator) http_generator->set_log(sink);
    if (http_judge) http_judge->set_log(sink);
    if (http_search) http_search->set_log(sink);
}

Backends make_backends(const RunConfig& config) {
    config.validate();
    Backends b;
    if (config.simulation()) {
        auto corpus = std::make_shared<SyntheticCorpus>(SyntheticCorpus::load(config.backend.corpus));
        corpus->validate();
        auto clock = std::make_shared<SimulatedClock>();
        b.corpus = corpus;
        b.clock = clock;
        b.sim = std::make_shared<SimBackend>(corpus, clock);
        b.generator = b.sim.get();
        b.judge = b.sim.get();
        b.search = b.sim.get();
        b.fitness_max = static_cast<double>(corpus->key_points.size());
        return b;
    }
    b.clock = std::make_shared<SteadyClock>();
    b.http_generator = std::make_unique<HttpGenerator>(config.backend.generation);
    b.http_search = std::make_unique<HttpSearch>(config.backend.search);
    b.generator = b.http_generator.get();
    b.search = b.http_search.get();
    if (config.backend.judge) {
        b.http_judge = std::make_unique<HttpGenerator>(*config.backend.judge);
        b.judge = b.http_judge.get();
    } else {
        b.judge = b.generator;
    }
    return b;
}

PromptLibrary make_prompts(const RunConfig& config) {
    if (config.prompts_dir.empty()) return PromptLibrary();
    return PromptLibrary::with_overrides(config.prompts_dir);
}

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / ".redraft.lock") {
    fs::create_directories(dir);
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (FILE* f = std::fopen(path_.c_str(), "wx")) {
            std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
            std::fclose(f);
            return;
        }
        long pid = 0;
        std::ifstream in(path_);
        in >> pid;
        bool alive = pid > 0 && (::kill(static_cast<pid_t>(pid), 0) == 0 || errno == EPERM);
        if (alive) break;
        std::error_code ec;
        fs::remove(path_, ec);
    }
    throw ConfigError("output directory " + dir.string() + " is locked by another process (" + path_.string() + ")");
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string with_newline(std::string s) {
    if (s.empty() || s.back() != '\n') s += '\n';
    return s;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::optional<json> first_record(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

struct Resumable {
    ResearchState state;
    ResumeFrom from;
    std::int64_t t_ms = 0;
};

// Truncates an unfinished trajectory to its last commit. Returns nothing when the run
// must start fresh (no trajectory, no commit, or a finished run); the stale file is then removed.
std::optional<Resumable> prepare_resume(const fs::path& path, const RunConfig& config) {
    if (!fs::exists(path)) return std::nullopt;
    auto point = find_resume_point(path);
    if (!point.commit || point.completed) {
        fs::remove(path);
        return std::nullopt;
    }
    auto start = first_record(path);
    if (!start || start->value("kind", "") != "run_start") {
        throw ConfigError(path.string() + " does not begin with a run_start record; cannot resume");
    }
    if (start->value("config_id", "") != config.identifier()) {
        throw ConfigError("existing trajectory " + path.string() + " was produced with a different configuration (" +
                          start->value("config_id", "") + " vs " + config.identifier() + ")");
    }
    if (start->value("query", "") != config.query) {
        throw ConfigError("existing trajectory " + path.string() + " was produced for a different query");
    }
    truncate_lines(path, point.keep_lines);
    const auto& commit = *point.commit;
    Resumable r;
    r.state = restore(commit.at("state"));
    r.from.completed_iterations = commit.value("iteration", 0);
    r.from.exited = commit.value("exit", false);
    r.t_ms = commit.value("t_ms", std::int64_t{0});
    return r;
}

std::string draft_file_name(int revision) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%03d.md", revision);
    return buf;
}

double judged_fitness(const RunConfig& config, const std::string& query, const std::string& report) {
    auto backends = make_backends(config);
    auto prompts = make_prompts(config);
    auto judge = judge::make_judge(*backends.judge, prompts);
    auto reply = judge("fitness", {{"query", query}, {"content", report}});
    auto body = judge::parse_tagged(reply, "score");
    try {
        return std::stod(body);
    } catch (const std::exception&) {
        throw ParseError("score", "<score> does not hold a number: '" + body + "'");
    }
}

} // namespace

ResearchResult run_research(const RunConfig& config, const ResearchOptions& options) {
    config.validate();
    if (text::trim(config.query).empty()) throw ConfigError("research needs a non-empty query");
    const auto out = config.output_dir;
    DirectoryLock lock(out);
    const auto traj_path = out / "trajectory.jsonl";

    auto backends = make_backends(config);
    auto prompts = make_prompts(config);
    auto resumable = prepare_resume(traj_path, config);
    auto trajectory = Trajectory::open_file(traj_path);

    RunContext ctx(*backends.generator, *backends.search, prompts, *trajectory, *backends.clock, config);
    ctx.judge_generator = backends.judge;
    ctx.fitness_max = backends.fitness_max;
    ctx.halt_after_step = options.halt_after_step;
    if (!config.simulation()) ctx.sleeper = real_sleeper();
    backends.log_into(ctx);
    ctx.on_draft = [&out](const Report& draft) {
        write_file(out / "drafts" / draft_file_name(draft.revision_index), with_newline(draft.body));
    };

    ResearchState initial;
    std::optional<ResumeFrom> resume;
    if (resumable) {
        backends.clock->resume_at(resumable->t_ms);
        initial = resumable->state;
        resume = resumable->from;
        if (options.log) {
            *options.log << "resuming " << traj_path.string() << " after iteration "
                         << resumable->from.completed_iterations << "\n";
        }
    } else {
        initial.query = config.query;
        initial.config_snapshot = config.identifier();
        auto recorded = config.to_json();
        recorded.erase("output_dir");
        ctx.record({{"kind", "run_start"},
                    {"query", config.query},
                    {"mode", to_string(config.mode)},
                    {"seed", config.seed},
                    {"config_id", config.identifier()},
                    {"config", recorded}});
    }

    auto outcome = run_pipeline(initial, ctx, pipeline_registry(), resume);

    ResearchResult result;
    result.output_dir = out;
    result.report = outcome.report.body;
    result.state = outcome.state;
    result.resumed = resumable.has_value();
    result.total_ms = backends.clock->now_ms();
    if (backends.corpus) result.score = backends.corpus->key_point_coverage(result.report);

    ctx.record({{"kind", "run_end"},
                {"total_ms", result.total_ms},
                {"score", result.score ? json(*result.score) : json(nullptr)},
                {"report", result.report},
                {"state", snapshot(result.state)}});

    write_file(out / "report.md", with_newline(result.report));
    json summary{{"query", config.query},
                 {"mode", to_string(config.mode)},
                 {"seed", config.seed},
                 {"config_id", config.identifier()},
                 {"steps", result.state.step},
                 {"draft_revisions", result.state.draft ? result.state.draft->revision_index : 0},
                 {"total_ms", result.total_ms},
                 {"score", result.score ? json(*result.score) : json(nullptr)}};
    write_file(out / "summary.json", summary.dump(2) + "\n");
    return result;
}

AblationResult run_ablation(const RunConfig& base, const ResearchOptions& options) {
    base.validate();
    AblationResult result;
    result.seed = base.seed;
    json modes = json::array();
    std::string tsv = "mode\tseed\tcoverage\tfitness\ttotal_ms\tlog10_seconds\n";
    for (auto mode : {Mode::backbone, Mode::evolution, Mode::denoising}) {
        auto config = base;
        config.mode = mode;
        config.output_dir = base.output_dir / std::string(to_string(mode));
        auto run = run_research(config, options);
        AblationRow row;
        row.mode = mode;
        row.coverage = run.score.value_or(0.0);
        row.fitness = judged_fitness(config, config.query, run.report);
        row.total_ms = run.total_ms;
        row.log10_seconds = run.total_ms > 0 ? std::log10(static_cast<double>(run.total_ms) / 1000.0) : 0.0;
        row.trajectory = config.output_dir / "trajectory.jsonl";
        if (!run.score) row.coverage = row.fitness;
        modes.push_back({{"mode", to_string(mode)},
                         {"coverage", row.coverage},
                         {"fitness", row.fitness},
                         {"total_ms", row.total_ms},
                         {"log10_seconds", row.log10_seconds},
                         {"steps", run.state.step},
                         {"trajectory", row.trajectory.string()}});
        tsv += std::string(to_string(mode)) + "\t" + std::to_string(base.seed) + "\t" + fixed(row.coverage, 4) + "\t" +
               fixed(row.fitness, 2) + "\t" + std::to_string(row.total_ms) + "\t" + fixed(row.log10_seconds, 4) + "\n";
        result.rows.push_back(row);
    }
    json doc{{"query", base.query},
             {"seed", base.seed},
             {"corpus", base.backend.corpus.string()},
             {"coverage_metric", base.simulation() ? "planted key-point coverage" : "judged fitness"},
             {"modes", modes}};
    write_file(base.output_dir / "ablation.json", doc.dump(2) + "\n");
    write_file(base.output_dir / "ablation.tsv", tsv);
    return result;
}

namespace {

struct ReportEntry {
    fs::path path;
    std::string query;
};

std::map<std::string, ReportEntry> collect_reports(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
    std::map<std::string, ReportEntry> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& p = entry.path();
        if (entry.is_regular_file() && p.extension() == ".md") {
            ReportEntry r{p, {}};
            auto sidecar = fs::path(p).replace_extension(".query.txt");
            if (fs::exists(sidecar)) r.query = text::trim(read_file(sidecar));
            out[p.stem().string()] = r;
        } else if (entry.is_directory() && fs::exists(p / "report.md")) {
            ReportEntry r{p / "report.md", {}};
            if (fs::exists(p / "summary.json")) {
                auto j = json::parse(read_file(p / "summary.json"), nullptr, false);
                if (!j.is_discarded()) r.query = j.value("query", "");
            }
            out[p.filename().string()] = r;
        }
    }
    return out;
}

} // namespace

EvalSummary run_eval(const fs::path& dir_a, const fs::path& dir_b, const RunConfig& config, const fs::path& out_dir,
                     std::ostream& warnings) {
    auto a = collect_reports(dir_a);
    auto b = collect_reports(dir_b);
    auto backends = make_backends(config);
    auto prompts = make_prompts(config);
    auto judge = judge::make_judge(*backends.judge, prompts);

    EvalSummary summary;
    std::set<std::string> ids;
    for (const auto& [id, _] : a) ids.insert(id);
    for (const auto& [id, _] : b) ids.insert(id);
    std::string jsonl;
    for (const auto& id : ids) {
        auto ia = a.find(id);
        auto ib = b.find(id);
        if (ia == a.end() || ib == b.end()) {
            summary.unmatched.push_back(id);
            warnings << "warning: report '" << id << "' has no counterpart in "
                     << (ia == a.end() ? dir_a.string() : dir_b.string()) << "; skipped\n";
            continue;
        }
        auto query = !ia->second.query.empty() ? ia->second.query : !ib->second.query.empty() ? ib->second.query : id;
        EvalPair pair{id, query,
                      judge::compare_side_by_side(judge, query, read_file(ia->second.path), read_file(ib->second.path))};
        if (judge::favors_a(pair.result.label)) {
            ++summary.wins;
        } else if (judge::favors_b(pair.result.label)) {
            ++summary.losses;
        } else {
            ++summary.ties;
        }
        json row{{"id", id},
                 {"query", query},
                 {"label", judge::to_string(pair.result.label)},
                 {"forward", judge::to_string(pair.result.forward)},
                 {"swapped", judge::to_string(pair.result.swapped)},
                 {"raw_forward", pair.result.raw_forward},
                 {"raw_swapped", pair.result.raw_swapped},
                 {"schema_version", kSchemaVersion}};
        jsonl += row.dump() + "\n";
        summary.pairs.push_back(std::move(pair));
    }
    if (summary.pairs.empty()) warnings << "warning: no report ids are shared by both directories\n";
    auto judged = static_cast<double>(summary.pairs.size());
    summary.win_rate = judged > 0 ? 100.0 * summary.wins / judged : 0.0;

    std::string text = "# " + std::string(kWinRateDefinition) + "\n";
    text += "pairs\t" + std::to_string(summary.pairs.size()) + "\n";
    text += "wins\t" + std::to_string(summary.wins) + "\n";
    text += "ties\t" + std::to_string(summary.ties) + "\n";
    text += "losses\t" + std::to_string(summary.losses) + "\n";
    text += "win_rate\t" + fixed(summary.win_rate, 1) + "\n";
    text += "unmatched\t" + std::to_string(summary.unmatched.size()) + "\n";
    fs::create_directories(out_dir);
    write_file(out_dir / "eval.jsonl", jsonl);
    write_file(out_dir / "summary.txt", text);
    return summary;
}

namespace {

std::string run_id_of(const fs::path& path) {
    if (path.filename() == "trajectory.jsonl" && path.has_parent_path()) {
        auto parent = fs::absolute(path).parent_path().filename().string();
        if (!parent.empty()) return parent;
    }
    return path.stem().string();
}

double final_value(const std::vector<std::pair<int, double>>& series) {
    return series.empty() ? 0.0 : series.back().second;
}

} // namespace

std::vector<RunMetrics> run_metrics(const std::vector<fs::path>& trajectories, const RunConfig& config,
                                    const fs::path& out_dir) {
    std::vector<RunMetrics> runs;
    std::optional<Backends> backends;
    std::optional<PromptLibrary> prompts;
    judge::JudgeFn judge;
    if (!trajectories.empty()) {
        backends.emplace(make_backends(config));
        prompts.emplace(make_prompts(config));
        judge = judge::make_judge(*backends->judge, *prompts);
    }
    std::string jsonl;
    std::string tsv = "run_id\tmethod\tstep\tquestion_complexity\tanswer_complexity\tnovelty\tnovelty_pct\treport_coverage\n";
    std::string pareto_tsv = "run_id\tmethod\ttotal_seconds\tlog10_seconds\tscore\n";
    for (const auto& path : trajectories) {
        auto records = read_trajectory(path);
        RunMetrics run;
        run.run_id = run_id_of(path);
        std::optional<json> start, end, last_commit;
        for (const auto& r : records) {
            auto kind = r.value("kind", "");
            if (kind == "run_start") start = r;
            if (kind == "run_end") end = r;
            if (kind == "commit") last_commit = r;
        }
        if (start) run.method = metrics::method_from_mode(start->value("mode", "backbone"));
        ResearchState state;
        if (end) {
            state = restore(end->at("state"));
        } else if (last_commit) {
            state = restore(last_commit->at("state"));
        }
        std::optional<std::string> report;
        if (end && end->contains("report")) {
            report = end->at("report").get<std::string>();
        } else if (state.final_report) {
            report = state.final_report->body;
        }

        std::vector<metrics::MetricSample> qc, ac, nov, cov;
        std::vector<std::string> used;
        std::string answers;
        for (const auto& qa : state.qa_history) {
            int step = qa.step_index;
            auto sample = [&](const char* name, double v) {
                return metrics::MetricSample{run.run_id, step, name, v, run.method};
            };
            qc.push_back(sample("question_complexity", metrics::question_complexity(judge, qa.question)));
            ac.push_back(sample("answer_complexity", metrics::answer_complexity(judge, qa.answer)));
            nov.push_back(sample("novelty", metrics::query_novelty(judge, used, qa.question)));
            used.push_back(qa.question);
            answers += (answers.empty() ? "" : "\n") + qa.answer;
            if (report) cov.push_back(sample("report_coverage", metrics::report_coverage(judge, *report, answers)));
        }
        run.question_complexity = metrics::cumulative_series(qc);
        run.answer_complexity = metrics::cumulative_series(ac);
        run.novelty = metrics::cumulative_series(nov);
        run.novelty_percentage = metrics::novelty_percentage_series(nov, qc);
        for (const auto& s : cov) run.report_coverage.emplace_back(s.step, s.value);
        for (auto* list : {&qc, &ac, &nov, &cov}) run.samples.insert(run.samples.end(), list->begin(), list->end());

        for (const auto& s : run.samples) {
            json row{{"run_id", s.run_id},
                     {"method", metrics::to_string(s.method)},
                     {"step", s.step},
                     {"metric", s.metric},
                     {"value", s.value},
                     {"schema_version", kSchemaVersion}};
            jsonl += row.dump() + "\n";
        }
        for (std::size_t i = 0; i < run.question_complexity.size(); ++i) {
            auto cov_value = i < run.report_coverage.size() ? fixed(run.report_coverage[i].second, 2) : std::string("");
            tsv += run.run_id + "\t" + std::string(metrics::to_string(run.method)) + "\t" +
                   std::to_string(run.question_complexity[i].first) + "\t" +
                   fixed(run.question_complexity[i].second, 0) + "\t" + fixed(run.answer_complexity[i].second, 0) +
                   "\t" + fixed(run.novelty[i].second, 0) + "\t" + fixed(run.novelty_percentage[i].second, 2) + "\t" +
                   cov_value + "\n";
        }
        if (end && end->value("total_ms", std::int64_t{0}) > 0) {
            double score = final_value(run.report_coverage);
            if (end->contains("score") && end->at("score").is_number()) score = end->at("score").get<double>();
            metrics::RunTiming timing{run.run_id, static_cast<double>(end->at("total_ms").get<std::int64_t>()) / 1000.0,
                                      score};
            auto point = metrics::pareto_points({timing}).front();
            run.pareto = point;
            pareto_tsv += run.run_id + "\t" + std::string(metrics::to_string(run.method)) + "\t" +
                          fixed(timing.total_seconds, 3) + "\t" + fixed(point.log10_seconds, 4) + "\t" +
                          fixed(point.score, 4) + "\n";
        }
        runs.push_back(std::move(run));
    }
    fs::create_directories(out_dir);
    write_file(out_dir / "metrics.jsonl", jsonl);
    write_file(out_dir / "metrics.tsv", tsv);
    write_file(out_dir / "pareto.tsv", pareto_tsv);
    return runs;
}

} // namespace redraft
