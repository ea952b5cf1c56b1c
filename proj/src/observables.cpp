#include "lgtsim/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace lgtsim::obs {

namespace {

// iterate a trajectory's stored states uniformly (mixed or pure)
template <typename F>
void for_each_state(const dynamics::Trajectory& traj, const F& f) {
    if (!traj.states.empty()) {
        if (traj.states.size() != traj.times.size())
            throw std::invalid_argument("observables: trajectory state count mismatch");
        for (size_t i = 0; i < traj.times.size(); ++i) f(traj.times[i], traj.states[i], nullptr);
    } else if (!traj.pure_states.empty()) {
        if (traj.pure_states.size() != traj.times.size())
            throw std::invalid_argument("observables: trajectory state count mismatch");
        for (size_t i = 0; i < traj.times.size(); ++i)
            f(traj.times[i], Matrix(), &traj.pure_states[i]);
    } else {
        throw std::invalid_argument("observables: trajectory carries no stored states");
    }
}

double expect_mixed_or_pure(const Matrix& rho, const Vector* psi, const Matrix& op) {
    if (psi) return expectation(*psi, op);
    return expectation(rho, op);
}

}  // namespace

double expectation(const Matrix& rho, const Matrix& op) {
    return (rho * op).trace().real();
}

double expectation(const Vector& psi, const Matrix& op) {
    return (psi.adjoint() * op * psi)(0).real();
}

Operator condensate_operator(const models::ModelBundle& bundle) {
    const LatticeSpec& lat = bundle.lattice;
    const int L = lat.n_matter;
    Matrix op = 0.5 * identity_op(lat);
    for (int j = 1; j <= L; ++j)
        op += embed_local(lat, lat.matter_subsystem(j), pauli::sigma_z()).mat / (2.0 * L);
    return make_hermitian_operator(std::move(op));
}

std::vector<double> imbalance_weights(const models::ModelBundle& bundle, const Vector& psi0) {
    const LatticeSpec& lat = bundle.lattice;
    std::vector<double> p(lat.n_matter);
    for (int j = 1; j <= lat.n_matter; ++j)
        p[j - 1] = expectation(psi0, embed_local(lat, lat.matter_subsystem(j), pauli::sigma_z()).mat);
    return p;
}

Operator imbalance_integrand_operator(const models::ModelBundle& bundle,
                                      const std::vector<double>& p) {
    const LatticeSpec& lat = bundle.lattice;
    if (p.size() != static_cast<size_t>(lat.n_matter))
        throw std::invalid_argument("imbalance: weight count mismatch");
    Matrix op = Matrix::Zero(lat.dim(), lat.dim());
    for (int j = 1; j <= lat.n_matter; ++j)
        op += p[j - 1] * embed_local(lat, lat.matter_subsystem(j), pauli::number()).mat;
    op /= static_cast<double>(lat.n_matter);
    return make_hermitian_operator(std::move(op));
}

double midchain_entropy_of(const Matrix& rho_comp, const LatticeSpec& lattice) {
    if (lattice.subsystems() % 2 != 0)
        throw std::invalid_argument("midchain_entropy: odd subsystem count");
    std::vector<int> kept(lattice.subsystems() / 2);
    for (size_t i = 0; i < kept.size(); ++i) kept[i] = static_cast<int>(i);
    return von_neumann_entropy(partial_trace(rho_comp, lattice, kept));
}

double midchain_entropy_of(const Vector& psi_comp, const LatticeSpec& lattice) {
    if (lattice.subsystems() % 2 != 0)
        throw std::invalid_argument("midchain_entropy: odd subsystem count");
    // contiguous msb-first split: psi(a * dB + b)
    const int half = lattice.subsystems() / 2;
    const long da = 1L << half;
    const long db = lattice.dim() / da;
    Matrix m(da, db);
    for (long a = 0; a < da; ++a)
        for (long b = 0; b < db; ++b) m(a, b) = psi_comp(a * db + b);
    return von_neumann_entropy(m * m.adjoint());
}

double TrapezoidAverage::push(double t, double value) {
    if (!started_) {
        started_ = true;
        integral_ = value * t;
        last_t_ = t;
        last_v_ = value;
        return value;
    }
    integral_ += 0.5 * (value + last_v_) * (t - last_t_);
    last_t_ = t;
    last_v_ = value;
    return t > 0 ? integral_ / t : value;
}

ObservableSeries gauge_violation(const dynamics::Trajectory& traj,
                                 const models::ModelBundle& bundle) {
    const Matrix op = models::violation_operator(bundle).mat;
    ObservableSeries out;
    out.name = "violation";
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        out.times.push_back(t);
        out.values.push_back(std::max(0.0, expect_mixed_or_pure(rho, psi, op)));
    });
    return out;
}

ObservableSeries chiral_condensate(const dynamics::Trajectory& traj,
                                   const models::ModelBundle& bundle) {
    if (bundle.kind != models::ModelKind::u1_qlm)
        throw std::invalid_argument("chiral_condensate: defined for the U(1) model");
    const Matrix op = condensate_operator(bundle).mat;
    ObservableSeries out;
    out.name = "condensate";
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        out.times.push_back(t);
        out.values.push_back(expect_mixed_or_pure(rho, psi, op));
    });
    return out;
}

ObservableSeries imbalance(const dynamics::Trajectory& traj, const models::ModelBundle& bundle,
                           const std::vector<double>& p) {
    const Matrix op = imbalance_integrand_operator(bundle, p).mat;
    ObservableSeries out;
    out.name = "imbalance_avg";
    TrapezoidAverage avg;
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        out.times.push_back(t);
        out.values.push_back(avg.push(t, expect_mixed_or_pure(rho, psi, op)));
    });
    return out;
}

ObservableSeries fidelity(const dynamics::Trajectory& traj, const Vector& psi0) {
    ObservableSeries out;
    out.name = "fidelity";
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        double f;
        if (psi) {
            const Complex amp = (psi0.adjoint() * (*psi))(0);
            f = std::norm(amp);
        } else {
            f = (psi0.adjoint() * rho * psi0)(0).real();
        }
        if (f < -1e-8 || f > 1.0 + 1e-8)
            throw std::runtime_error("fidelity: value outside [0, 1] beyond tolerance");
        out.times.push_back(t);
        out.values.push_back(f);
    });
    return out;
}

ObservableSeries midchain_entropy(const dynamics::Trajectory& traj, const LatticeSpec& lattice,
                                  bool time_average) {
    ObservableSeries out;
    out.name = time_average ? "entropy_midchain_avg" : "entropy_midchain";
    TrapezoidAverage avg;
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        const double s = psi ? midchain_entropy_of(*psi, lattice) : midchain_entropy_of(rho, lattice);
        out.times.push_back(t);
        out.values.push_back(time_average ? avg.push(t, s) : s);
    });
    return out;
}

std::vector<SectorSeries> sector_weights(const dynamics::Trajectory& traj,
                                         const std::vector<models::Sector>& sectors) {
    std::vector<SectorSeries> out(sectors.size());
    for (size_t s = 0; s < sectors.size(); ++s) {
        out[s].g = sectors[s].g;
        out[s].series.name = "sector_weight";
    }
    for_each_state(traj, [&](double t, const Matrix& rho, const Vector* psi) {
        double total = 0.0;
        for (size_t s = 0; s < sectors.size(); ++s) {
            const double w = expect_mixed_or_pure(rho, psi, sectors[s].projector);
            total += w;
            out[s].series.times.push_back(t);
            out[s].series.values.push_back(w);
        }
        if (std::abs(total - 1.0) > 1e-8)
            throw std::runtime_error("sector_weights: weights do not sum to 1");
    });
    return out;
}

}  // namespace lgtsim::obs
