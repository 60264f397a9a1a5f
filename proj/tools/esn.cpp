// Command-line front end: generate the synthetic dataset, fetch the
// Japanese-vowels files, run experiment plans, and summarize result CSVs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "esn/data.hpp"
#include "esn/fetch.hpp"
#include "esn/harness.hpp"

namespace {

int cmd_gen(const std::string& out, std::size_t segments, std::size_t period,
            std::uint64_t seed) {
    esn::SineSquareConfig config{period, segments, seed};
    const esn::LabeledSequenceSet set = esn::gen_sine_square(config);
    esn::export_csv(set, out);
    std::cerr << "wrote " << out << " (" << set.size() << " segments, period " << period
              << ")\n";
    return 0;
}

int cmd_run(const std::string& plan_path, const std::string& out_override,
            const std::string& data_dir_override, std::size_t threads_override, bool verbose) {
    esn::ExperimentPlan plan = esn::parse_plan_file(plan_path);
    if (!out_override.empty()) plan.output = out_override;
    if (!data_dir_override.empty()) plan.data_dir = data_dir_override;
    if (threads_override != 0) plan.threads = threads_override;

    const esn::ResultTable table = esn::run_plan(plan);
    esn::write_csv(table, plan.output);
    for (const std::string& w : table.warnings) std::cerr << "warning: " << w << "\n";
    if (verbose) {
        for (const std::string& n : table.notes) std::cerr << n << "\n";
    }
    std::cerr << "wrote " << plan.output << " (" << table.rows.size() << " rows)\n";
    return table.warnings.empty() ? 0 : 2;
}

int cmd_report(const std::string& results_path) {
    const esn::ResultTable table = esn::read_results_csv(results_path);
    std::cout << esn::report_best(table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Echo state network readout benchmark"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a sine/square stream as CSV");
    std::string gen_out = "sine_square.csv";
    std::size_t gen_segments = 100;
    std::size_t gen_period = 10;
    std::uint64_t gen_seed = 1;
    gen->add_option("--out", gen_out, "Output CSV path");
    gen->add_option("--segments", gen_segments, "Number of segments");
    gen->add_option("--period", gen_period, "Samples per segment (even, >= 4)");
    gen->add_option("--seed", gen_seed, "Stream seed");

    // fetch-jv
    auto* fetch = app.add_subcommand("fetch-jv", "Download and verify the Japanese-vowels files");
    esn::FetchOptions fetch_options;
    if (const char* env = std::getenv("ESN_DATA_DIR"); env != nullptr && *env != '\0') {
        fetch_options.dir = env;
    }
    fetch->add_option("--dir", fetch_options.dir, "Dataset cache directory");
    fetch->add_option("--base-url", fetch_options.base_url, "Base URL of the dataset files");
    fetch->add_option("--sha256-train", fetch_options.sha256_train,
                      "Expected sha256 of ae.train");
    fetch->add_option("--sha256-test", fetch_options.sha256_test, "Expected sha256 of ae.test");
    fetch->add_flag("--force", fetch_options.force, "Re-download even if files exist");

    // run
    auto* run = app.add_subcommand("run", "Execute an experiment plan and write a results CSV");
    std::string run_plan_path;
    std::string run_out;
    std::string run_data_dir;
    std::size_t run_threads = 0;
    bool run_verbose = false;
    run->add_option("--plan", run_plan_path, "Plan file (key = value format)")->required();
    run->add_option("--out", run_out, "Override the plan's output path");
    run->add_option("--data-dir", run_data_dir, "Override the dataset directory");
    run->add_option("--threads", run_threads, "Worker threads (0 = hardware)");
    run->add_flag("--verbose", run_verbose, "Print per-cell timing");

    // report
    auto* report = app.add_subcommand("report", "Best method per (N, sigma) from a results CSV");
    std::string report_results;
    report->add_option("--results", report_results, "Results CSV from 'run'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_out, gen_segments, gen_period, gen_seed);
        if (fetch->parsed()) return esn::fetch_jv(fetch_options, std::cerr);
        if (run->parsed()) {
            return cmd_run(run_plan_path, run_out, run_data_dir, run_threads, run_verbose);
        }
        if (report->parsed()) return cmd_report(report_results);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
