#include "lgtsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lgtsim::dynamics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output quartic (Hairer's rcont5 coefficients)
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Rhs = std::function<void(double, const Matrix&, Matrix&)>;

struct StepperCallbacks {
    // called with the interpolated state at each requested grid time
    std::function<void(double, const Matrix&)> on_sample;
    // called on the live state after each accepted step; may adjust it
    std::function<void(Matrix&)> post_step;
};

struct StepperStats {
    long steps = 0;
    long rejected = 0;
    long rhs = 0;
};

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double abs_tol,
                  double rel_tol) {
    const long n = err.size();
    double acc = 0.0;
    const Complex* pe = err.data();
    const Complex* p0 = y0.data();
    const Complex* p1 = y1.data();
    for (long i = 0; i < n; ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(p0[i]), std::abs(p1[i]));
        const double q = std::abs(pe[i]) / scale;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

// adaptive DOPRI5 with PI control and 4th-order dense output; the state is a
// complex matrix (density-matrix envelope, or a column vector for pure states)
StepperStats dopri5(const Rhs& rhs, Matrix& y, const std::vector<double>& grid,
                    const IntegratorConfig& cfg, const StepperCallbacks& cb) {
    StepperStats stats;
    const int rows = static_cast<int>(y.rows());
    const int cols = static_cast<int>(y.cols());
    Matrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols),
        k6(rows, cols), k7(rows, cols), ytmp(rows, cols), ynew(rows, cols), yerr(rows, cols);

    size_t gi = 0;
    double t = 0.0;
    if (!grid.empty() && grid[0] == 0.0) {
        cb.on_sample(0.0, y);
        gi = 1;
    }
    if (gi >= grid.size()) return stats;
    const double t_end = grid.back();

    rhs(t, y, k1);
    stats.rhs += 1;

    // initial step from the magnitude of the derivative
    double h = cfg.max_step;
    {
        const double d0 = y.norm();
        const double df = k1.norm();
        if (df > 1e-14) h = std::min(h, 0.01 * std::max(d0, 1.0) / df);
        h = std::min(h, grid[gi] - t > 0 ? grid[gi] : cfg.max_step);
        h = std::min(h, t_end - t);
        h = std::max(h, 1e-12);
    }

    constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0;
    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75;
    double fac_old = 1e-4;

    while (t < t_end) {
        if (h < 1e-12 * std::max(1.0, std::abs(t)))
            throw std::runtime_error("dynamics: step size underflow (stiffness guard) at t = " +
                                     std::to_string(t));
        h = std::min(h, t_end - t);

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        stats.rhs += 6;

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = error_norm(yerr, y, ynew, cfg.abs_tol, cfg.rel_tol);

        if (err > 1.0) {
            stats.rejected += 1;
            const double fac11 = std::pow(err, expo1);
            h /= std::min(1.0 / fac_min, fac11 / safe);
            continue;
        }

        // dense output for grid points inside (t, t + h)
        const bool need_interp = gi < grid.size() && grid[gi] < t + h;
        Matrix rc2, rc3, rc4, rc5;
        if (need_interp) {
            rc2 = ynew - y;
            rc3 = h * k1 - rc2;
            rc4 = rc2 - h * k7 - rc3;
            rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        }
        while (gi < grid.size() && grid[gi] < t + h) {
            const double theta = (grid[gi] - t) / h;
            const double theta1 = 1.0 - theta;
            ytmp = y + theta * (rc2 + theta1 * (rc3 + theta * (rc4 + theta1 * rc5)));
            cb.on_sample(grid[gi], ytmp);
            ++gi;
        }

        t += h;
        y.swap(ynew);
        if (cb.post_step) cb.post_step(y);
        stats.steps += 1;

        while (gi < grid.size() && grid[gi] <= t) {
            cb.on_sample(grid[gi], y);
            ++gi;
        }

        k1.swap(k7);  // FSAL
        const double fac11 = std::pow(std::max(err, 1e-300), expo1);
        double fac = fac11 / std::pow(fac_old, beta);
        fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
        h = std::min(h / fac, cfg.max_step);
        fac_old = std::max(err, 1e-4);
    }
    return stats;
}

}  // namespace

void IntegratorConfig::validate() const {
    if (rel_tol <= 0 || abs_tol <= 0) throw std::invalid_argument("integrator: tolerances must be positive");
    if (max_step <= 0) throw std::invalid_argument("integrator: max_step must be positive");
    if (grid.empty()) throw std::invalid_argument("integrator: empty output grid");
    if (grid.front() < 0) throw std::invalid_argument("integrator: grid must start at t >= 0");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw std::invalid_argument("integrator: grid must be strictly increasing");
}

std::vector<double> uniform_grid(double t_max, int n_samples) {
    if (t_max <= 0 || n_samples < 1) throw std::invalid_argument("uniform_grid: bad parameters");
    std::vector<double> g(n_samples + 1);
    for (int i = 0; i <= n_samples; ++i) g[i] = t_max * i / n_samples;
    return g;
}

std::vector<double> log_grid(double t_min, double t_max, int n_samples) {
    if (t_min <= 0 || t_max <= t_min || n_samples < 2)
        throw std::invalid_argument("log_grid: bad parameters");
    std::vector<double> g(n_samples);
    const double la = std::log(t_min), lb = std::log(t_max);
    for (int i = 0; i < n_samples; ++i)
        g[i] = std::exp(la + (lb - la) * i / (n_samples - 1));
    g.back() = t_max;
    return g;
}

Trajectory evolve(const redfield::RedfieldGenerator& gen, const Matrix& rho0_comp,
                  const IntegratorConfig& cfg, const OpenSampler& sampler) {
    cfg.validate();
    const int d = gen.dim();
    if (rho0_comp.rows() != d || rho0_comp.cols() != d)
        throw std::invalid_argument("evolve: state dimension mismatch");
    if (!is_valid_density(rho0_comp))
        throw std::invalid_argument("evolve: initial state is not a valid density matrix");

    Matrix sigma = gen.to_eigenbasis(rho0_comp);

    Trajectory traj;
    const size_t n_samples = cfg.grid.size();
    traj.times.reserve(n_samples);
    const int stride = cfg.min_eig_stride > 0
                           ? cfg.min_eig_stride
                           : std::max<int>(1, static_cast<int>(n_samples) / 64);

    Matrix phases, rho_eig;
    auto on_sample = [&](double t, const Matrix& sig) {
        gen.envelope_phases(t, phases);
        rho_eig = phases.array() * sig.array();

        const double trace_err = std::abs(rho_eig.trace() - Complex(1.0, 0.0));
        const double herm_err = max_abs(rho_eig - rho_eig.adjoint());
        double mineig = kNaN;
        const size_t idx = traj.times.size();
        if (idx % stride == 0 || idx + 1 == n_samples) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_eig + rho_eig.adjoint()),
                                                     Eigen::EigenvaluesOnly);
            mineig = es.eigenvalues().minCoeff();
        }
        if (trace_err > 1e-7 || herm_err > 1e-7)
            throw std::runtime_error("evolve: trajectory invariant breach at t = " + std::to_string(t) +
                                     " (trace " + std::to_string(trace_err) + ", herm " +
                                     std::to_string(herm_err) + ")");

        traj.times.push_back(t);
        traj.trace_error.push_back(trace_err);
        traj.herm_error.push_back(herm_err);
        traj.min_eig.push_back(mineig);
        if (cfg.store_states) traj.states.push_back(gen.to_computational(rho_eig));
        if (sampler) sampler({t, rho_eig, trace_err, herm_err, mineig});
    };

    auto post_step = [&](Matrix& sig) {
        sig = 0.5 * (sig + sig.adjoint()).eval();
        if (cfg.renormalize_trace) {
            const double tr = sig.trace().real();
            if (std::abs(tr - 1.0) > 1e-3)
                throw std::runtime_error("evolve: trace drifted beyond recovery");
            sig /= tr;
        }
    };

    auto rhs = [&gen](double, const Matrix& sig, Matrix& out) { gen.apply_envelope(sig, out); };

    StepperStats stats = dopri5(rhs, sigma, cfg.grid, cfg, {on_sample, post_step});
    traj.n_steps = stats.steps;
    traj.n_rejected = stats.rejected;
    traj.n_rhs = stats.rhs;
    return traj;
}

Trajectory evolve_closed(const Operator& hamiltonian, const Vector& psi0,
                         const IntegratorConfig& cfg, const ClosedSampler& sampler,
                         ClosedMethod method) {
    cfg.validate();
    if (!is_valid_state(psi0)) throw std::invalid_argument("evolve_closed: state not normalized");
    const long d = psi0.size();
    if (hamiltonian.mat.rows() != d) throw std::invalid_argument("evolve_closed: dimension mismatch");

    Trajectory traj;
    auto record = [&](double t, const Vector& psi) {
        traj.times.push_back(t);
        const double norm_err = std::abs(psi.norm() - 1.0);
        traj.trace_error.push_back(norm_err);
        traj.herm_error.push_back(0.0);
        traj.min_eig.push_back(0.0);
        if (cfg.store_states) traj.pure_states.push_back(psi);
        if (sampler) sampler({t, psi});
    };

    if (method == ClosedMethod::spectral) {
        EigenDecomposition eig = hermitian_eig(hamiltonian);
        Vector c0 = eig.eigenvectors.adjoint() * psi0;
        Vector phase(d), psi(d);
        for (double t : cfg.grid) {
            for (long i = 0; i < d; ++i)
                phase(i) = std::polar(1.0, -eig.eigenvalues(i) * t) * c0(i);
            psi = eig.eigenvectors * phase;
            record(t, psi);
        }
        return traj;
    }

    // stepped propagation of the Schroedinger equation
    Matrix psi_mat = psi0;
    const Matrix& h = hamiltonian.mat;
    auto rhs = [&h](double, const Matrix& y, Matrix& out) { out = Complex(0, -1) * (h * y); };
    Vector psi_view;
    auto on_sample = [&](double t, const Matrix& y) {
        psi_view = y.col(0);
        record(t, psi_view);
    };
    auto post_step = [](Matrix& y) { y /= y.norm(); };
    StepperStats stats = dopri5(rhs, psi_mat, cfg.grid, cfg, {on_sample, post_step});
    traj.n_steps = stats.steps;
    traj.n_rejected = stats.rejected;
    traj.n_rhs = stats.rhs;
    return traj;
}

}  // namespace lgtsim::dynamics
