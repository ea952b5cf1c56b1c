// redfield.hpp — secular Bloch-Redfield generator: eigenoperator decomposition
// of Hermitian jump operators over binned Bohr frequencies, dissipator assembly
// in the Lindblad-diagonal form, golden-rule validity diagnostics, and a dense
// superoperator oracle for small dimensions.
//
// The generator is represented in the energy eigenbasis. All Bohr frequencies
// eps_a - eps_b are clustered once (single-linkage, gap tolerance bin_tol);
// the same clustering provides the eigenoperator bins and the coherence
// classes, so the dissipator conserves the class of every density-matrix
// element and the evolution factorizes into exact phases times a slow
// envelope (see dynamics.hpp).

#pragma once

#include "lgtsim/hilbert.hpp"
#include "lgtsim/noise.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace lgtsim::redfield {

// ------------------------------ eigenoperators ------------------------------

struct EigenOperatorBlock {
    int bin = -1;       // index into EigenOperatorSet::bin_rep
    double omega = 0.0; // representative frequency of the bin
    std::vector<int32_t> row;  // entry (row n, col m) carries omega = eps_m - eps_n
    std::vector<int32_t> col;
    std::vector<Complex> val;
};

struct EigenOperatorSet {
    EigenDecomposition eig;
    double bin_tol = 0.0;
    double spectral_range = 0.0;

    std::vector<double> bin_rep;              // ascending, exactly +-mirrored, 0 snapped
    std::vector<double> bin_width;            // max - min member frequency per bin
    Eigen::MatrixXi bin_of;                   // bin_of(n, m) = bin of eps_m - eps_n
    std::vector<std::vector<EigenOperatorBlock>> blocks;  // [jump][populated bins]

    int dim() const { return static_cast<int>(eig.eigenvalues.size()); }
    int zero_bin() const;                     // bin whose representative is exactly 0
    Matrix reconstruct(int jump) const;       // sum of blocks, in the eigenbasis
};

// bin_tol <= 0 selects the default 1e-8 * spectral range of H
EigenOperatorSet decompose_eigenoperators(const Operator& hamiltonian,
                                          const std::vector<Operator>& jumps,
                                          double bin_tol = 0.0);

// --------------------------------- generator --------------------------------

struct GeneratorOptions {
    bool secular = true;
    bool drop_zero_frequency = false;
    // bins with at most this many entries are materialized as explicit
    // couplings; larger bins are applied as sparse sandwiches at runtime
    long coupling_budget = 8'000'000;
    long dense_dim_limit = 32;  // non-secular generators only
};

struct ValidityReport {
    double threshold = 0.1;
    double max_ratio = 0.0;  // max over (i, f) of Gamma_if / |omega_if|
    bool pass = true;
    size_t n_checked = 0;
    int worst_i = -1, worst_f = -1;
    double worst_rate = 0.0, worst_omega = 0.0;
};

class RedfieldGenerator {
  public:
    int dim() const { return dim_; }
    const EigenDecomposition& eig() const { return eig_; }
    bool secular() const { return secular_; }

    // Schroedinger picture: d rho / dt with rho given in the energy eigenbasis
    Matrix apply(const Matrix& rho_eig) const;

    // dissipator + detuning action on the rotating-frame envelope
    // (exact coherent phases factored out; see header comment)
    void apply_envelope(const Matrix& sigma, Matrix& out) const;

    // e^{-i omega_rep t} per element, used to assemble rho from the envelope
    void envelope_phases(double t, Matrix& phases) const;

    const Eigen::MatrixXd& omega_rep() const { return omega_rep_; }
    double max_dissipative_rate() const { return max_rate_; }
    long materialized_couplings() const { return static_cast<long>(c_val_.size()); }

    Matrix to_eigenbasis(const Matrix& rho_comp) const;
    Matrix to_computational(const Matrix& rho_eig) const;

  private:
    friend RedfieldGenerator assemble_generator(const EigenOperatorSet&,
                                                const std::vector<noise::Spectrum>&,
                                                const GeneratorOptions&);
    friend Matrix dense_superoperator(const RedfieldGenerator&);

    int dim_ = 0;
    bool secular_ = true;
    bool drop_zero_ = false;
    EigenDecomposition eig_;
    double bin_tol_ = 0.0;
    double max_rate_ = 0.0;

    // per-element data (column-major over (a, b) pairs, index a + dim * b)
    Eigen::MatrixXd omega_rep_;    // class representative of omega_ab
    Matrix diag_term_;             // -i (omega_ab - rep) - (M_aa + M_bb) / 2

    // materialized couplings: out[dst] += coef * sigma[src]
    std::vector<int32_t> c_dst_, c_src_;
    std::vector<Complex> c_val_;

    // runtime sparse sandwiches S * A rho A^dag for large bins
    struct SandwichBlock {
        double rate = 0.0;
        std::vector<int32_t> row, col;
        std::vector<Complex> val;
    };
    std::vector<SandwichBlock> sandwiches_;

    // off-diagonal anticommutator part, applied as -1/2 (M_off rho + rho M_off)
    std::vector<int32_t> m_row_, m_col_;
    std::vector<Complex> m_val_;

    // non-secular representation (dense superoperator over vec(rho), d <= limit)
    std::shared_ptr<Matrix> dense_;

    // inputs retained for the dense-superoperator oracle and diagnostics
    std::shared_ptr<const EigenOperatorSet> eset_;
    std::vector<noise::Spectrum> spectra_;
};

RedfieldGenerator assemble_generator(const EigenOperatorSet& eset,
                                     const std::vector<noise::Spectrum>& spectra,
                                     const GeneratorOptions& opts = {});

ValidityReport validity_check(const EigenOperatorSet& eset,
                              const std::vector<noise::Spectrum>& spectra,
                              double threshold = 0.1);

// d^2 x d^2 matrix over column-major vec(rho) in the energy eigenbasis,
// assembled independently from the relaxation-tensor index form; d <= 32
Matrix dense_superoperator(const RedfieldGenerator& gen);

}  // namespace lgtsim::redfield
