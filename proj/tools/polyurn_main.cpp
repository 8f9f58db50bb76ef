#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polyurn/catalog.hpp"
#include "polyurn/errors.hpp"
#include "polyurn/report.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitNotTenable = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<std::int64_t> steps;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

void attach_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment configuration file")->required();
    cmd->add_option("--seed", opts.seed, "override the configured RNG seed");
    cmd->add_option("--reps", opts.reps, "override the configured replication count");
    cmd->add_option("--steps", opts.steps, "override the configured step count");
    cmd->add_option("--out", opts.out_dir, "override the configured output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (default: POLYURN_THREADS or hardware)");
}

polyurn::ExperimentConfig load_with_overrides(const CommonOptions& opts) {
    polyurn::ExperimentConfig config = polyurn::load_config(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.reps) {
        if (*opts.reps < 1) throw polyurn::ConfigError("config: --reps must be at least 1");
        config.n_reps = *opts.reps;
    }
    if (opts.steps) {
        if (*opts.steps < 1) throw polyurn::ConfigError("config: --steps must be positive");
        config.n_steps = *opts.steps;
        // explicit checkpoints may no longer fit the overridden horizon
        if (!config.checkpoints.empty() && config.checkpoints.back() > config.n_steps) config.checkpoints.clear();
    }
    if (opts.out_dir) config.output_dir = *opts.out_dir;
    return config;
}

int resolve_threads(const CommonOptions& opts) {
    if (opts.threads) return *opts.threads;
    if (const char* env = std::getenv("POLYURN_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring non-integer POLYURN_THREADS='" << env << "'\n";
        }
    }
    return 0;
}

int require_tenable(const polyurn::ExperimentConfig& config) {
    const auto report = polyurn::check_tenability(config.rule(), config.initial_state(), config.mode);
    if (!report.tenable) {
        std::cerr << "scheme is not tenable: " << report.first_violation() << "\n";
        return kExitNotTenable;
    }
    return 0;
}

int cmd_analyze(const CommonOptions& opts) {
    const auto config = load_with_overrides(opts);
    const auto report = polyurn::analyze(config);
    std::cout << polyurn::render_analysis(report, config);
    if (opts.out_dir) {
        std::filesystem::create_directories(config.output_dir);
        std::ofstream text(std::filesystem::path(config.output_dir) / "analysis.txt");
        text << polyurn::render_analysis(report, config);
        polyurn::write_analysis_csv(report, config.output_dir);
    }
    return 0;
}

int cmd_simulate(const CommonOptions& opts) {
    const auto config = load_with_overrides(opts);
    if (int code = require_tenable(config)) return code;
    const auto files = polyurn::simulate_to_files(config, config.output_dir, resolve_threads(opts));
    std::cout << "wrote " << files.terminal_csv.string() << "\n";
    std::cout << "wrote " << files.checkpoint_csv.string() << "\n";
    std::cout << "wrote " << files.metadata.string() << "\n";
    return 0;
}

int cmd_verify(const CommonOptions& opts) {
    const auto config = load_with_overrides(opts);
    if (int code = require_tenable(config)) return code;
    const auto report = polyurn::verify(config, resolve_threads(opts));
    std::cout << polyurn::render_verify(report);
    if (opts.out_dir) polyurn::write_verify_csv(report, config.output_dir);
    return report.all_passed ? 0 : kExitVerifyFailed;
}

int cmd_examples(const std::string& name, const std::optional<std::string>& out_path) {
    if (name == "list") {
        for (const auto& entry : polyurn::catalogue_entries()) {
            std::cout << entry.name << "  " << entry.description << "\n";
        }
        return 0;
    }
    const auto config = polyurn::catalogue_config(name);
    const std::string text = polyurn::serialize_config(config);
    if (out_path) {
        std::ofstream out(*out_path);
        if (!out) {
            std::cerr << "cannot write '" << *out_path << "'\n";
            return kExitInvalidConfig;
        }
        out << text;
        std::cout << "wrote " << *out_path << "\n";
    } else {
        std::cout << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-drawing Polya urns: analytic predictions and Monte Carlo verification"};
    app.require_subcommand(1);

    CommonOptions analyze_opts, simulate_opts, verify_opts;
    std::string example_name;
    std::optional<std::string> example_out;

    CLI::App* analyze = app.add_subcommand("analyze", "tenability, zeros, stability, CLT parameters");
    attach_common(analyze, analyze_opts);
    CLI::App* simulate = app.add_subcommand("simulate", "run the ensemble and write CSV outputs");
    attach_common(simulate, simulate_opts);
    CLI::App* verify = app.add_subcommand("verify", "compare analytic predictions against Monte Carlo");
    attach_common(verify, verify_opts);
    CLI::App* examples = app.add_subcommand("examples", "built-in example catalogue");
    examples->add_option("name", example_name, "catalogue name, or 'list'")->required();
    examples->add_option("--out", example_out, "write the configuration to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_opts);
        if (simulate->parsed()) return cmd_simulate(simulate_opts);
        if (verify->parsed()) return cmd_verify(verify_opts);
        if (examples->parsed()) return cmd_examples(example_name, example_out);
    } catch (const polyurn::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    return 0;
}
