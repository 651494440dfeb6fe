// Command-line entry point: run, sweep and report.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sawei/errors.hpp"
#include "sawei/experiment.hpp"
#include "sawei/report.hpp"
#include "sawei/trace_io.hpp"

namespace {

void print_summary(const sawei::ExperimentResult& result) {
    std::cout << "runs: " << result.runs.size() << ", aborted: " << result.aborted()
              << ", aggregates: " << result.curves.size() << "\n"
              << "manifest: " << result.manifest.string() << "\n";
}

sawei::ExperimentConfig load_config(const std::string& path, const std::string& out,
                                    std::size_t workers) {
    auto cfg = sawei::ExperimentConfig::load(path);
    cfg.output_dir = out;
    if (workers > 0) {
        cfg.workers = workers;
    }
    sawei::apply_seed_offset(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-adjusting weighted expected improvement: experiments and reports"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string grid_spec = "default";
    std::string in_dir;
    std::size_t workers = 0;
    bool plots = false;

    auto* run = app.add_subcommand("run", "Run every task x schedule x seed combination");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--workers", workers, "Worker threads (overrides the config)");

    auto* sweep = app.add_subcommand("sweep", "Ablation sweep of the controller settings");
    sweep->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--grid", grid_spec, "\"default\" or a grid JSON file");
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--workers", workers, "Worker threads (overrides the config)");

    auto* report = app.add_subcommand("report", "Emit tables and plots for an artifact directory");
    report->add_option("--in", in_dir, "Artifact directory")->required();
    report->add_flag("--plots", plots, "Also write SVG charts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            print_summary(sawei::run_experiment(load_config(config_path, out_dir, workers)));
        } else if (sweep->parsed()) {
            const auto cfg = load_config(config_path, out_dir, workers);
            sawei::AblationGrid grid;
            if (grid_spec != "default") {
                grid = sawei::AblationGrid::from_json(
                    nlohmann::json::parse(sawei::read_text_file(grid_spec)));
            }
            const auto result = sawei::ablation_sweep(cfg, grid);
            std::cout << "combos: " << result.combos.size() << "\n";
            print_summary(result.experiment);
        } else if (report->parsed()) {
            const auto result = sawei::emit_report(in_dir, plots);
            for (const auto& f : result.files) {
                std::cout << f.string() << "\n";
            }
        }
    } catch (const sawei::MissingManifest& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sawei::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
