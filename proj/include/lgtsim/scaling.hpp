// scaling.hpp — early-time slope extraction from gauge-violation series and
// cross-run scaling fits: slope vs gamma linearity and slope vs V power law

#pragma once

#include <string>
#include <vector>

namespace lgtsim::harness {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int n_points = 0;
};

// least-squares slope of eps(t) over the early-time window
// [min(0.5, t_hi/4), t_hi] with t_hi = min(5, first crossing of
// 0.1 * eps_plateau); the first three samples are always excluded
SlopeFit fit_early_slope(const std::vector<double>& t, const std::vector<double>& eps,
                         double eps_plateau);

struct ScalingFit {
    std::string varied;  // "V" or "gamma"
    std::vector<double> values;
    std::vector<SlopeFit> slopes;

    // varied == "V": log-log regression slope is -beta_hat
    double beta_hat = 0.0;
    double beta_stderr = 0.0;
    double r_squared = 0.0;

    // varied == "gamma": max relative deviation of slope/gamma from its mean
    double max_linearity_deviation = 0.0;
};

ScalingFit fit_scaling(const std::string& index_path);
std::string render_scaling_report(const ScalingFit& fit);

// CSV helpers shared with the tests
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    std::vector<double> numeric(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace lgtsim::harness
