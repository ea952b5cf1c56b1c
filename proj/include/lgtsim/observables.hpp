// observables.hpp — quantities tracked along trajectories: gauge violation,
// chiral condensate, imbalance, fidelity, mid-chain entanglement entropy,
// and superselection-sector weights

#pragma once

#include "lgtsim/dynamics.hpp"
#include "lgtsim/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace lgtsim::obs {

struct ObservableSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
    std::map<std::string, std::string> metadata;
};

// ------------------------------ point evaluators ----------------------------

double expectation(const Matrix& rho, const Matrix& op);
double expectation(const Vector& psi, const Matrix& op);

// 1/2 + (1/2L) sum_j sigma^z_j over matter sites (U(1) chiral condensate;
// the same operator measures mean matter occupation for Z2)
Operator condensate_operator(const models::ModelBundle& bundle);

// p_j = <psi0| sigma^z_j |psi0> on matter sites
std::vector<double> imbalance_weights(const models::ModelBundle& bundle, const Vector& psi0);

// (1/L) sum_j p_j n_j — the instantaneous imbalance integrand
Operator imbalance_integrand_operator(const models::ModelBundle& bundle,
                                      const std::vector<double>& p);

double midchain_entropy_of(const Matrix& rho_comp, const LatticeSpec& lattice);
double midchain_entropy_of(const Vector& psi_comp, const LatticeSpec& lattice);

// running trapezoidal time average, (1/t) integral_0^t; the first sample
// defines the average as the instantaneous integrand
class TrapezoidAverage {
  public:
    double push(double t, double value);

  private:
    bool started_ = false;
    double last_t_ = 0.0, last_v_ = 0.0, integral_ = 0.0;
};

// ------------------------------ trajectory series ---------------------------
// These require trajectories recorded with store_states = true.

ObservableSeries gauge_violation(const dynamics::Trajectory& traj,
                                 const models::ModelBundle& bundle);
ObservableSeries chiral_condensate(const dynamics::Trajectory& traj,
                                   const models::ModelBundle& bundle);
ObservableSeries imbalance(const dynamics::Trajectory& traj, const models::ModelBundle& bundle,
                           const std::vector<double>& p);
ObservableSeries fidelity(const dynamics::Trajectory& traj, const Vector& psi0);
ObservableSeries midchain_entropy(const dynamics::Trajectory& traj, const LatticeSpec& lattice,
                                  bool time_average = false);

struct SectorSeries {
    std::vector<int> g;
    ObservableSeries series;
};
std::vector<SectorSeries> sector_weights(const dynamics::Trajectory& traj,
                                         const std::vector<models::Sector>& sectors);

}  // namespace lgtsim::obs
