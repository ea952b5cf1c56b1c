#include "lgtsim/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace lgtsim {

// --------------------------------- lattice ---------------------------------

LatticeSpec LatticeSpec::chain(int n_sites, Boundary b) {
    LatticeSpec s;
    s.n_matter = n_sites;
    s.n_links = (b == Boundary::periodic) ? n_sites : n_sites - 1;
    s.boundary = b;
    s.validate();
    return s;
}

void LatticeSpec::validate() const {
    if (n_matter < 2) throw std::invalid_argument("LatticeSpec: need at least 2 matter sites");
    const int expected = (boundary == Boundary::periodic) ? n_matter : n_matter - 1;
    if (n_links != expected) throw std::invalid_argument("LatticeSpec: link count inconsistent with boundary");
    if (subsystems() > 30) throw std::invalid_argument("LatticeSpec: dimension exceeds dense-solver range");
}

int LatticeSpec::matter_subsystem(int site) const {
    if (site < 1 || site > n_matter) throw std::out_of_range("matter_subsystem: site out of range");
    return 2 * (site - 1);
}

int LatticeSpec::link_subsystem(int link) const {
    if (link < 1 || link > n_links) throw std::out_of_range("link_subsystem: link out of range");
    return 2 * (link - 1) + 1;
}

// -------------------------------- operators --------------------------------

namespace pauli {
Matrix id2() { return Matrix::Identity(2, 2); }
Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
Matrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}
Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}
Matrix number() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1;
    return m;
}
}  // namespace pauli

Operator embed_local(const LatticeSpec& lattice, int subsystem_index, const Matrix& local_op) {
    if (local_op.rows() != 2 || local_op.cols() != 2)
        throw std::invalid_argument("embed_local: local operator must be 2x2");
    const int n = lattice.subsystems();
    if (subsystem_index < 0 || subsystem_index >= n)
        throw std::out_of_range("embed_local: subsystem index out of range");

    const long dim_left = 1L << subsystem_index;
    const long dim_right = 1L << (n - 1 - subsystem_index);
    const long dim = dim_left * 2 * dim_right;

    Matrix out = Matrix::Zero(dim, dim);
    for (long il = 0; il < dim_left; ++il) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const Complex v = local_op(a, b);
                if (v == Complex(0, 0)) continue;
                const long row0 = (il * 2 + a) * dim_right;
                const long col0 = (il * 2 + b) * dim_right;
                for (long ir = 0; ir < dim_right; ++ir) out(row0 + ir, col0 + ir) = v;
            }
        }
    }

    Operator op;
    op.mat = std::move(out);
    op.hermitian = is_hermitian(local_op, 1e-14 * std::max(1.0, max_abs(local_op)));
    return op;
}

Matrix identity_op(const LatticeSpec& lattice) {
    return Matrix::Identity(lattice.dim(), lattice.dim());
}

// ------------------------------ dense kernels ------------------------------

double max_abs(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) <= tol;
}

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Operator make_hermitian_operator(Matrix m) {
    const double scale = std::max(1.0, max_abs(m));
    if (!is_hermitian(m, 1e-12 * scale))
        throw std::invalid_argument("make_hermitian_operator: matrix is not Hermitian");
    Operator op;
    op.mat = std::move(m);
    op.hermitian = true;
    return op;
}

EigenDecomposition hermitian_eig(const Operator& op) {
    if (!op.hermitian) throw std::invalid_argument("hermitian_eig: operator not tagged Hermitian");
    const double scale = std::max(1.0, max_abs(op.mat));
    if (!is_hermitian(op.mat, 1e-12 * scale))
        throw std::invalid_argument("hermitian_eig: matrix fails Hermiticity check");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.mat);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver did not converge");

    EigenDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();
    return d;
}

Matrix partial_trace(const Matrix& rho, const LatticeSpec& lattice, const std::vector<int>& kept) {
    const int n = lattice.subsystems();
    if (rho.rows() != lattice.dim() || rho.cols() != lattice.dim())
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (kept.empty()) throw std::invalid_argument("partial_trace: kept set is empty");

    std::vector<bool> keep_flag(n, false);
    for (int k : kept) {
        if (k < 0 || k >= n) throw std::out_of_range("partial_trace: subsystem out of range");
        if (keep_flag[k]) throw std::invalid_argument("partial_trace: duplicate subsystem");
        keep_flag[k] = true;
    }

    // bit shifts (msb-first) for kept and traced subsystems in canonical order
    std::vector<int> keep_shift, trace_shift;
    for (int s = 0; s < n; ++s) {
        (keep_flag[s] ? keep_shift : trace_shift).push_back(n - 1 - s);
    }
    const int nk = static_cast<int>(keep_shift.size());
    const int nt = static_cast<int>(trace_shift.size());
    const long dk = 1L << nk;
    const long dt = 1L << nt;

    auto scatter = [](long idx, const std::vector<int>& shifts) {
        long full = 0;
        for (size_t p = 0; p < shifts.size(); ++p) {
            const long bit = (idx >> (shifts.size() - 1 - p)) & 1L;
            full |= bit << shifts[p];
        }
        return full;
    };

    std::vector<long> keep_part(dk), trace_part(dt);
    for (long i = 0; i < dk; ++i) keep_part[i] = scatter(i, keep_shift);
    for (long i = 0; i < dt; ++i) trace_part[i] = scatter(i, trace_shift);

    Matrix out = Matrix::Zero(dk, dk);
    for (long a = 0; a < dk; ++a) {
        for (long b = 0; b < dk; ++b) {
            Complex sum(0, 0);
            for (long t = 0; t < dt; ++t)
                sum += rho(keep_part[a] | trace_part[t], keep_part[b] | trace_part[t]);
            out(a, b) = sum;
        }
    }
    return out;
}

double von_neumann_entropy(const Matrix& rho, double clip) {
    const double scale = std::max(1.0, max_abs(rho));
    if (!is_hermitian(rho, 1e-10 * scale))
        throw std::invalid_argument("von_neumann_entropy: rho not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("von_neumann_entropy: eigensolver did not converge");

    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lam = solver.eigenvalues()(i);
        if (lam < -1e-8) throw std::invalid_argument("von_neumann_entropy: eigenvalue below -1e-8");
        if (lam > clip) s -= lam * std::log(lam);
    }
    return std::max(s, 0.0);
}

// ------------------------------- state checks ------------------------------

bool is_valid_state(const Vector& psi, double tol) {
    return std::abs(psi.norm() - 1.0) <= tol;
}

bool is_valid_density(const Matrix& rho, double herm_tol, double trace_tol, double eig_floor) {
    if (rho.rows() != rho.cols()) return false;
    if (!is_hermitian(rho, herm_tol)) return false;
    if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
        return false;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) return false;
    return solver.eigenvalues().minCoeff() >= eig_floor;
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Matrix h = 0.5 * ((a - b) + (a - b).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("trace_distance: eigensolver did not converge");
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace lgtsim
