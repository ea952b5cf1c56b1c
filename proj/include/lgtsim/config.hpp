// config.hpp — experiment configuration: a flat key = value file format with
// '#' comments. All energies are in units of J, times in 1/J.

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgtsim::harness {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // model
    std::string model = "u1";  // u1 | z2
    int L = 4;
    std::string boundary = "periodic";  // periodic | open
    double mu = 0.5;                    // U(1) mass
    double h = 0.54;                    // Z2 electric field
    std::array<double, 4> eta = {1.0, 1.0, 1.0, 1.0};

    std::string initial_state = "u1_vacuum";  // preset name or custom:<bits>

    // protection
    std::string protection = "none";        // none | linear | quadratic
    std::string generator_source = "full";  // full | pseudo
    std::string sequence = "compliant_L4";  // kind name or custom:c1,c2,...
    std::vector<double> V = {0.0};          // protection strength (grid allowed)

    double lambda = 0.0;  // coherent error strength

    // noise
    std::string spectrum = "power_law";  // power_law | rtn | composite | flat
    std::vector<double> gamma = {0.1};   // coupling strength (grid allowed)
    double beta = 1.0;
    double omega_cutoff = 1e-2;
    double rtn_rate = 1.0;
    double band_lo = 1e-2;
    double band_hi = 1e2;
    double alpha = 1.0;
    double flat_level = 0.0;
    std::string jumps = "both";  // both | matter | gauge

    // generator
    bool secular = true;
    bool drop_zero_frequency = false;
    double bin_tol = 0.0;  // 0 = auto (1e-8 x spectral range)
    long coupling_budget = 8000000;

    // integrator
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.05;
    bool renormalize_trace = true;
    std::string grid = "log:0.1,1000,400";  // log:tmin,tmax,n | lin:tmax,n | list:t1,...
    int min_eig_stride = 0;

    // run control
    double validity_threshold = 0.1;
    std::string output_dir = "out";
    long seed = 1234;  // consumed by randomized property tests only
    int workers = 0;   // 0 = LGTSIM_WORKERS or hardware default

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_string(const std::string& text);

    void validate() const;
    std::string echo() const;  // re-parsable key = value form, sorted keys
    std::vector<double> output_grid() const;
};

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace lgtsim::harness
