#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "varshift/cli.hpp"

namespace {

std::vector<std::string> split_steps(const std::string& text) {
    std::vector<std::string> steps;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            if (!current.empty()) steps.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) steps.push_back(current);
    return steps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"varshift - variance regime shift detection toolkit"};
    app.set_version_flag("--version", varshift::cli::tool_version);
    app.require_subcommand(1);

    // detect
    varshift::cli::DetectConfig detect_config;
    std::string detect_steps;
    auto* detect = app.add_subcommand("detect", "Detect variance change points in a CSV series");
    detect->add_option("-i,--input", detect_config.input_path, "Input CSV (value or time,value)")
        ->required();
    detect->add_option("-o,--output", detect_config.output_path, "Report path")->required();
    detect->add_option("--method", detect_config.method, "srsd | icss | both");
    detect->add_option("--p", detect_config.srsd.target_probability,
                       "SRSD target probability level");
    detect->add_option("--cutoff", detect_config.srsd.cutoff_length, "SRSD cut-off length");
    detect->add_option("--huber", detect_config.srsd.huber_constant, "SRSD Huber constant");
    detect->add_option("--alpha", detect_config.icss_alpha, "ICSS significance level");
    detect->add_option("--steps", detect_steps,
                       "Comma-separated preprocessing chain, e.g. lowess:0.1,prewhiten:auto");
    detect->add_option("--critvals", detect_config.critical_values_path,
                       "Critical value table (overrides VARSHIFT_CRITICAL_VALUES)");

    // simulate
    varshift::cli::SimulateConfig simulate_config;
    int simulate_reps = 0;
    std::int64_t simulate_seed = -1;
    auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo comparison experiments");
    simulate->add_option("-c,--config", simulate_config.config_path, "Scenario config file");
    simulate->add_option("-o,--out", simulate_config.output_dir, "Output directory")->required();
    simulate->add_flag("--suite", simulate_config.reference_suite,
                       "Run the bundled reference suite");
    simulate->add_option("--workers", simulate_config.workers, "Worker threads");
    simulate->add_option("--reps", simulate_reps, "Override replications");
    simulate->add_option("--seed", simulate_seed, "Override seed");

    // critvals
    varshift::cli::CritvalsConfig critvals_config;
    std::int64_t critvals_seed = -1;
    auto* critvals =
        app.add_subcommand("critvals", "Simulate the cusum critical value table");
    critvals->add_option("--lengths", critvals_config.lengths, "Series lengths")->delimiter(',');
    critvals->add_option("--alphas", critvals_config.alphas, "Significance levels")
        ->delimiter(',');
    critvals->add_option("--reps", critvals_config.replications, "Replications per length");
    critvals->add_option("--seed", critvals_seed, "Simulation seed");
    critvals->add_option("-o,--out", critvals_config.output_path, "Table output path")->required();
    critvals->add_option("--cpp", critvals_config.cpp_output_path,
                         "Also emit the builtin-table C++ source");
    critvals->add_option("--workers", critvals_config.workers, "Worker threads");

    // preprocess
    varshift::cli::PreprocessConfig preprocess_config;
    std::string preprocess_steps;
    auto* preprocess = app.add_subcommand("preprocess", "Apply a preprocessing chain to a CSV");
    preprocess->add_option("-i,--input", preprocess_config.input_path, "Input CSV")->required();
    preprocess->add_option("-o,--output", preprocess_config.output_path, "Output CSV")->required();
    preprocess->add_option("--steps", preprocess_steps, "Comma-separated chain");

    CLI11_PARSE(app, argc, argv);

    if (detect->parsed()) {
        detect_config.steps = split_steps(detect_steps);
        return varshift::cli::run_detect(detect_config, std::cerr);
    }
    if (simulate->parsed()) {
        if (simulate_reps > 0) simulate_config.replications_override = simulate_reps;
        if (simulate_seed >= 0) {
            simulate_config.seed_override = static_cast<std::uint64_t>(simulate_seed);
        }
        if (!simulate_config.reference_suite && simulate_config.config_path.empty()) {
            std::cerr << "error: simulate needs --config or --suite\n";
            return 1;
        }
        return varshift::cli::run_simulate(simulate_config, std::cerr);
    }
    if (critvals->parsed()) {
        if (critvals_seed >= 0) critvals_config.seed = static_cast<std::uint64_t>(critvals_seed);
        return varshift::cli::run_critvals(critvals_config, std::cerr);
    }
    if (preprocess->parsed()) {
        preprocess_config.steps = split_steps(preprocess_steps);
        return varshift::cli::run_preprocess(preprocess_config, std::cerr);
    }
    return 1;
}
