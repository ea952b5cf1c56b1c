// lgtsim — exact-diagonalization simulator for noisy lattice gauge theories
//
// exit codes: 0 success, 1 runtime invariant breach, 2 configuration error

#include "lgtsim/config.hpp"
#include "lgtsim/runner.hpp"
#include "lgtsim/scaling.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int dispatch(const std::string& command, const std::string& path, const std::string& out_override) {
    using namespace lgtsim::harness;

    if (command == "tables") {
        std::cout << render_tables();
        return 0;
    }
    if (command == "fit-scaling") {
        const ScalingFit fit = fit_scaling(path);
        std::cout << render_scaling_report(fit);
        return 0;
    }

    ExperimentConfig cfg = ExperimentConfig::parse_file(path);
    if (!out_override.empty()) cfg.output_dir = out_override;

    if (command == "validate") {
        std::cout << cfg.echo();
        return 0;
    }
    if (command == "run") {
        const RunResult r = run_one(cfg);
        std::cout << "wrote " << r.csv_path << "\n";
        std::cout << "validity: max Gamma/|omega| = " << format_double(r.validity.max_ratio)
                  << (r.validity.pass ? " (pass)" : " (FAIL)") << "\n";
        std::cout << "steps = " << r.n_steps << " rejected = " << r.n_rejected
                  << " wall = " << format_double(r.wall_seconds) << " s\n";
        return 0;
    }
    if (command == "sweep") {
        const SweepResult s = run_sweep(cfg);
        for (const RunResult& r : s.runs)
            std::cout << "wrote " << r.csv_path << " (wall " << format_double(r.wall_seconds)
                      << " s)\n";
        std::cout << "index: " << s.index_path << "\n";
        return 0;
    }
    throw std::runtime_error("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-diagonalization simulator for lattice gauge theories under 1/f^beta noise"};
    app.require_subcommand(1);

    std::string config_path, index_path, out_override;

    CLI::App* run = app.add_subcommand("run", "run a single quench from a config file");
    run->add_option("config", config_path, "experiment config")->required();
    run->add_option("-o,--output", out_override, "override output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "run the gamma x V grid from a config file");
    sweep->add_option("config", config_path, "experiment config")->required();
    sweep->add_option("-o,--output", out_override, "override output directory");

    CLI::App* fit = app.add_subcommand("fit-scaling", "fit early-time slopes from a sweep index");
    fit->add_option("index", index_path, "index.csv produced by sweep")->required();

    app.add_subcommand("tables", "print the Z2 eigenvalue table and the sector-weight tables");

    CLI::App* validate = app.add_subcommand("validate", "parse a config and print the resolved form");
    validate->add_option("config", config_path, "experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, command == "fit-scaling" ? index_path : config_path, out_override);
    } catch (const lgtsim::harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
