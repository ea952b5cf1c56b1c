// runner.hpp — experiment orchestration: build the model and generator from a
// configuration, evolve, and serialize CSV output plus a re-runnable metadata
// sidecar. Sweeps expand the gamma x V grid across a worker pool.

#pragma once

#include "lgtsim/config.hpp"
#include "lgtsim/redfield.hpp"

#include <string>
#include <vector>

namespace lgtsim::harness {

struct RunResult {
    double gamma = 0.0;
    double V = 0.0;
    std::string csv_path;
    std::string meta_path;
    double eps_plateau = 0.0;  // gauge violation of the maximally mixed state
    redfield::ValidityReport validity;
    double max_trace_error = 0.0;
    double max_herm_error = 0.0;
    double min_eigenvalue = 0.0;
    long n_steps = 0;
    long n_rejected = 0;
    double wall_seconds = 0.0;
};

// single run at explicit (gamma, V); writes <dir>/run_<tag>.csv and .meta
RunResult run_single(const ExperimentConfig& cfg, double gamma, double V,
                     const std::string& out_dir);

// `run`: requires size-1 gamma and V grids
RunResult run_one(const ExperimentConfig& cfg);

struct SweepResult {
    std::vector<RunResult> runs;
    std::string index_path;
};

// `sweep`: Cartesian product of the gamma and V grids
SweepResult run_sweep(const ExperimentConfig& cfg);

std::string run_tag(double gamma, double V);
std::string resolve_output_dir(const std::string& dir);  // LGTSIM_OUTPUT_ROOT aware
int resolve_workers(int requested);                      // LGTSIM_WORKERS aware

// `tables`: the Z2 local eigenvalue table and both sector-weight tables
std::string render_tables();

}  // namespace lgtsim::harness
