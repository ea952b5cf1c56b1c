// dynamics.hpp — adaptive time integration of d rho / dt = L(rho)
//
// Open-system trajectories integrate the rotating-frame envelope of the
// secular generator (coherent phases are applied analytically when sampling),
// so step sizes track the dissipative rates instead of the Bohr frequencies.
// Closed trajectories default to spectral propagation exp(-iHt).

#pragma once

#include "lgtsim/hilbert.hpp"
#include "lgtsim/redfield.hpp"

#include <functional>
#include <vector>

namespace lgtsim::dynamics {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.05;          // 1/J
    bool renormalize_trace = true;
    std::vector<double> grid;        // strictly increasing, first point >= 0
    bool store_states = false;       // keep per-sample states in the trajectory
    int min_eig_stride = 0;          // 0 = auto (~64 evaluations per run)

    void validate() const;
};

std::vector<double> uniform_grid(double t_max, int n_samples);            // includes 0
std::vector<double> log_grid(double t_min, double t_max, int n_samples);  // t_min > 0

struct Trajectory {
    std::vector<double> times;
    std::vector<double> trace_error;  // |Tr rho - 1| at each sample
    std::vector<double> herm_error;   // max |rho - rho^dag| at each sample
    std::vector<double> min_eig;      // NaN where not evaluated
    long n_steps = 0;
    long n_rejected = 0;
    long n_rhs = 0;
    std::vector<Matrix> states;       // computational-basis rho (open runs)
    std::vector<Vector> pure_states;  // computational-basis psi (closed runs)
};

struct OpenSample {
    double t;
    const Matrix& rho_eig;  // density matrix in the energy eigenbasis
    double trace_error;
    double herm_error;
    double min_eig;  // NaN if not evaluated at this sample
};
using OpenSampler = std::function<void(const OpenSample&)>;

struct ClosedSample {
    double t;
    const Vector& psi;  // computational basis
};
using ClosedSampler = std::function<void(const ClosedSample&)>;

Trajectory evolve(const redfield::RedfieldGenerator& gen, const Matrix& rho0_comp,
                  const IntegratorConfig& cfg, const OpenSampler& sampler = nullptr);

enum class ClosedMethod { spectral, stepped };

Trajectory evolve_closed(const Operator& hamiltonian, const Vector& psi0,
                         const IntegratorConfig& cfg, const ClosedSampler& sampler = nullptr,
                         ClosedMethod method = ClosedMethod::spectral);

}  // namespace lgtsim::dynamics
