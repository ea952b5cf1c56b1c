// hilbert.hpp — tensor-product operator algebra and dense Hermitian kernels
//
// Conventions used throughout:
//   * every subsystem is two-dimensional, local basis index 0 = up/occupied
//     (sigma^z = +1), index 1 = down/empty (sigma^z = -1)
//   * subsystems are ordered matter_1, link_12, matter_2, link_23, ...,
//     most-significant-subsystem-first in the tensor index, so a mid-chain
//     bipartition is a contiguous index split
//   * energies in units of J, times in 1/J, hbar = 1

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace lgtsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Boundary { periodic, open };

// --------------------------------- lattice ---------------------------------

struct LatticeSpec {
    int n_matter = 0;
    int n_links = 0;
    Boundary boundary = Boundary::periodic;

    static LatticeSpec chain(int n_sites, Boundary b);

    int subsystems() const { return n_matter + n_links; }
    long dim() const { return 1L << subsystems(); }

    // 1-based site/link labels to 0-based subsystem ordinals.
    // Link j is the link between sites j and j+1; for periodic chains link
    // n_matter closes the ring.
    int matter_subsystem(int site) const;
    int link_subsystem(int link) const;

    void validate() const;
};

// -------------------------------- operators --------------------------------

struct Operator {
    Matrix mat;
    bool hermitian = false;
};

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // columns
};

namespace pauli {
Matrix id2();
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix sigma_plus();   // |up><dn|
Matrix sigma_minus();  // |dn><up|
Matrix number();       // diag(1, 0), occupation under the basis convention
}  // namespace pauli

// identity (x) ... (x) local_op (x) ... (x) identity at the given subsystem
Operator embed_local(const LatticeSpec& lattice, int subsystem_index,
                     const Matrix& local_op);

Matrix identity_op(const LatticeSpec& lattice);

// ------------------------------ dense kernels ------------------------------

double max_abs(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = 1e-12);
Matrix comm(const Matrix& a, const Matrix& b);

Operator make_hermitian_operator(Matrix m);  // verifies and tags

EigenDecomposition hermitian_eig(const Operator& op);

// reduced density matrix on the kept subsystems (canonical order preserved)
Matrix partial_trace(const Matrix& rho, const LatticeSpec& lattice,
                     const std::vector<int>& kept);

// -sum lambda ln lambda over eigenvalues above the clip threshold (nats);
// eigenvalues below -1e-8 are rejected as invalid input
double von_neumann_entropy(const Matrix& rho, double clip = 1e-12);

// ------------------------------- state checks ------------------------------

bool is_valid_state(const Vector& psi, double tol = 1e-12);
bool is_valid_density(const Matrix& rho, double herm_tol = 1e-10,
                      double trace_tol = 1e-10, double eig_floor = -1e-8);

double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace lgtsim
