#include <iostream>

#include <CLI11.hpp>

#include "redraft/commands.hpp"

namespace {

using namespace redraft;

void add_common(CLI::App* cmd, std::string& config, Overrides& o, bool research_flags) {
    cmd->add_option("-c,--config", config, "Run configuration (JSON)")->required();
    if (!research_flags) return;
    cmd->add_option("--seed", o.seed, "Override the run seed");
    cmd->add_option("-o,--out", o.output_dir, "Override the output directory");
    cmd->add_option("-q,--query", o.query, "Override the research query");
}

int report_error(const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]";
    if (!e.node_path().empty()) std::cerr << " at " << e.node_path();
    std::cerr << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Draft-guided deep research agent with offline simulation"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    std::optional<int> halt_after_step;

    auto* research = app.add_subcommand("research", "Run one research pipeline and write its report");
    add_common(research, config_path, overrides, true);
    research->add_option("-m,--mode", overrides.mode, "backbone | evolution | denoising");
    research->add_option("--halt-after-step", halt_after_step)->group("");

    auto* ablate = app.add_subcommand("ablate", "Run all three modes with a shared seed and compare them");
    add_common(ablate, config_path, overrides, true);

    std::string dir_a, dir_b;
    std::filesystem::path eval_out = "eval";
    auto* eval = app.add_subcommand("eval", "Side-by-side judging of two report directories");
    add_common(eval, config_path, overrides, false);
    eval->add_option("dir_a", dir_a, "Reports of system A")->required();
    eval->add_option("dir_b", dir_b, "Reports of system B")->required();
    eval->add_option("-o,--out", eval_out, "Output directory");

    std::vector<std::filesystem::path> trajectories;
    std::filesystem::path metrics_out = "metrics";
    auto* metrics_cmd = app.add_subcommand("metrics", "Complexity, novelty, coverage and Pareto points from trajectories");
    add_common(metrics_cmd, config_path, overrides, false);
    metrics_cmd->add_option("trajectories", trajectories, "Trajectory files");
    metrics_cmd->add_option("-o,--out", metrics_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::config;
    }

    try {
        auto config = load_config(config_path, overrides);
        if (research->parsed()) {
            ResearchOptions options{halt_after_step, &std::cerr};
            auto result = run_research(config, options);
            std::cout << (result.output_dir / "report.md").string() << "\n";
        } else if (ablate->parsed()) {
            if (config.query.empty()) throw ConfigError("ablate needs a non-empty query");
            auto result = run_ablation(config, ResearchOptions{std::nullopt, &std::cerr});
            for (const auto& row : result.rows) {
                std::cout << to_string(row.mode) << "\tcoverage=" << row.coverage << "\tfitness=" << row.fitness
                          << "\ttotal_ms=" << row.total_ms << "\n";
            }
        } else if (eval->parsed()) {
            auto summary = run_eval(dir_a, dir_b, config, eval_out, std::cerr);
            std::cout << "pairs=" << summary.pairs.size() << " wins=" << summary.wins << " ties=" << summary.ties
                      << " losses=" << summary.losses << " win_rate=" << summary.win_rate << "\n";
        } else if (metrics_cmd->parsed()) {
            auto runs = run_metrics(trajectories, config, metrics_out);
            std::cout << "runs=" << runs.size() << "\n";
        }
    } catch (const HaltRequested& e) {
        std::cerr << "halted: " << e.what() << "\n";
        return exit_code::halted;
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error [internal]: " << e.what() << "\n";
        return exit_code::internal;
    }
    return exit_code::ok;
}
