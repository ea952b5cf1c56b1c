#include "lgtsim/hilbert.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lgtsim;

namespace {

Vector random_state(int dim, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector psi(dim);
    for (int i = 0; i < dim; ++i) psi(i) = Complex(dist(rng), dist(rng));
    psi /= psi.norm();
    return psi;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TEST_CASE("lattice spec geometry") {
    const LatticeSpec periodic = LatticeSpec::chain(4, Boundary::periodic);
    CHECK(periodic.n_links == 4);
    CHECK(periodic.subsystems() == 8);
    CHECK(periodic.dim() == 256);
    CHECK(periodic.matter_subsystem(1) == 0);
    CHECK(periodic.link_subsystem(1) == 1);
    CHECK(periodic.link_subsystem(4) == 7);

    const LatticeSpec open = LatticeSpec::chain(2, Boundary::open);
    CHECK(open.n_links == 1);
    CHECK(open.dim() == 8);

    LatticeSpec bad = periodic;
    bad.n_links = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("embed sigma_z at matter site 0 of an L=2 open lattice") {
    const LatticeSpec lat = LatticeSpec::chain(2, Boundary::open);
    const Operator op = embed_local(lat, 0, pauli::sigma_z());
    CHECK(op.hermitian);
    Eigen::VectorXd expected(8);
    expected << 1, 1, 1, 1, -1, -1, -1, -1;
    for (int i = 0; i < 8; ++i) {
        CHECK(op.mat(i, i).real() == doctest::Approx(expected(i)));
        CHECK(op.mat(i, i).imag() == 0.0);
    }
    CHECK(max_abs(op.mat - Matrix(op.mat.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("embed identity and Pauli algebra") {
    const LatticeSpec lat = LatticeSpec::chain(2, Boundary::open);
    CHECK(max_abs(embed_local(lat, 1, pauli::id2()).mat - identity_op(lat)) == 0.0);

    const Matrix sx = embed_local(lat, 2, pauli::sigma_x()).mat;
    CHECK(max_abs(sx * sx - identity_op(lat)) == 0.0);

    const Operator splus = embed_local(lat, 0, pauli::sigma_plus());
    CHECK_FALSE(splus.hermitian);

    CHECK_THROWS_AS(embed_local(lat, 3, pauli::sigma_x()), std::out_of_range);
    CHECK_THROWS_AS(embed_local(lat, 0, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("embedding commutes for disjoint subsystems") {
    const LatticeSpec lat = LatticeSpec::chain(3, Boundary::open);
    const Matrix a = embed_local(lat, 0, pauli::sigma_x()).mat;
    const Matrix b = embed_local(lat, 3, pauli::sigma_plus()).mat;
    CHECK(max_abs(a * b - b * a) <= 1e-14);
}

TEST_CASE("hermitian_eig on simple spectra") {
    const LatticeSpec lat = LatticeSpec::chain(2, Boundary::open);

    SUBCASE("already diagonal") {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 0) = 3;
        m(1, 1) = 1;
        m(2, 2) = 2;
        const EigenDecomposition d = hermitian_eig(make_hermitian_operator(m));
        CHECK(d.eigenvalues(0) == doctest::Approx(1));
        CHECK(d.eigenvalues(1) == doctest::Approx(2));
        CHECK(d.eigenvalues(2) == doctest::Approx(3));
    }

    SUBCASE("sigma_x spectrum and eigenvectors") {
        const EigenDecomposition d = hermitian_eig(make_hermitian_operator(pauli::sigma_x()));
        CHECK(d.eigenvalues(0) == doctest::Approx(-1));
        CHECK(d.eigenvalues(1) == doctest::Approx(1));
        // (|up> -+ |dn>)/sqrt(2) up to phase
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(d.eigenvectors(0, c)) == doctest::Approx(1 / std::sqrt(2.0)));
    }

    SUBCASE("non-Hermitian input rejected") {
        Operator bad;
        bad.mat = pauli::sigma_plus();
        bad.hermitian = true;
        CHECK_THROWS(hermitian_eig(bad));
        CHECK_THROWS_AS(make_hermitian_operator(pauli::sigma_plus()), std::invalid_argument);
    }

    SUBCASE("reconstruction and unitarity on a random Hermitian matrix") {
        std::mt19937 rng(7001);
        std::normal_distribution<double> dist(0.0, 1.0);
        Matrix m(16, 16);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) m(i, j) = Complex(dist(rng), dist(rng));
        m = 0.5 * (m + m.adjoint()).eval();
        const EigenDecomposition d = hermitian_eig(make_hermitian_operator(m));
        const Matrix rebuilt =
            d.eigenvectors * d.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
            d.eigenvectors.adjoint();
        CHECK(max_abs(m - rebuilt) <= 1e-9 * max_abs(m));
        CHECK(max_abs(d.eigenvectors.adjoint() * d.eigenvectors - Matrix::Identity(16, 16)) <= 1e-10);
    }
    (void)lat;
}

TEST_CASE("partial trace basics") {
    const LatticeSpec two = LatticeSpec::chain(2, Boundary::open);  // not used for dims here
    (void)two;

    // two-subsystem helper lattice: use L=2 open minus... build explicit 2-subsystem states
    LatticeSpec lat;
    lat.n_matter = 2;
    lat.n_links = 1;
    lat.boundary = Boundary::open;  // 3 subsystems

    SUBCASE("product state keeps the first factor pure") {
        // |up> (x) |dn> on a 2-subsystem space
        LatticeSpec pair;
        pair.n_matter = 2;
        pair.n_links = 0;
        pair.boundary = Boundary::open;
        // bypass validate(): construct operators directly over 4-dim space
        Vector up(2), dn(2);
        up << 1, 0;
        dn << 0, 1;
        Vector psi(4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) psi(a * 2 + b) = up(a) * dn(b);
        const Matrix rho = psi * psi.adjoint();

        LatticeSpec two_sub;
        two_sub.n_matter = 1;
        two_sub.n_links = 1;
        two_sub.boundary = Boundary::open;  // 2 subsystems, no validate needed
        const Matrix reduced = partial_trace(rho, two_sub, {0});
        CHECK(max_abs(reduced - up * up.adjoint()) <= 1e-14);
        CHECK(von_neumann_entropy(reduced) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("Bell state reduces to the maximally mixed qubit") {
        Vector bell = Vector::Zero(4);
        bell(0) = 1 / std::sqrt(2.0);  // |up,up>
        bell(3) = 1 / std::sqrt(2.0);  // |dn,dn>
        const Matrix rho = bell * bell.adjoint();
        LatticeSpec two_sub;
        two_sub.n_matter = 1;
        two_sub.n_links = 1;
        two_sub.boundary = Boundary::open;
        const Matrix reduced = partial_trace(rho, two_sub, {0});
        CHECK(max_abs(reduced - 0.5 * Matrix::Identity(2, 2)) <= 1e-14);
        CHECK(von_neumann_entropy(reduced) == doctest::Approx(std::log(2.0)));
    }

    SUBCASE("random tripartite states reduce to valid density matrices") {
        LatticeSpec three;
        three.n_matter = 2;
        three.n_links = 1;
        three.boundary = Boundary::open;
        std::mt19937 rng(7002);
        for (int trial = 0; trial < 100; ++trial) {
            const Vector psi = random_state(8, rng);
            const Matrix rho = psi * psi.adjoint();
            const Matrix reduced = partial_trace(rho, three, {1});
            CHECK(is_hermitian(reduced, 1e-12));
            CHECK(std::abs(reduced.trace().real() - 1.0) <= 1e-12);
            Eigen::SelfAdjointEigenSolver<Matrix> es(reduced, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        }
    }

    SUBCASE("trace preservation and product-state identity") {
        std::mt19937 rng(7003);
        LatticeSpec three;
        three.n_matter = 2;
        three.n_links = 1;
        three.boundary = Boundary::open;
        const Vector a = random_state(2, rng);
        const Vector b = random_state(4, rng);
        const Matrix rho_a = a * a.adjoint();
        const Matrix rho_b = b * b.adjoint();
        const Matrix rho = kron(rho_a, rho_b);
        CHECK(max_abs(partial_trace(rho, three, {0}) - rho_a) <= 1e-12);
        CHECK(std::abs(partial_trace(rho, three, {0, 2}).trace().real() - 1.0) <= 1e-12);
    }

    SUBCASE("invalid kept sets are rejected") {
        LatticeSpec three;
        three.n_matter = 2;
        three.n_links = 1;
        three.boundary = Boundary::open;
        const Matrix rho = Matrix::Identity(8, 8) / 8.0;
        CHECK_THROWS_AS(partial_trace(rho, three, {}), std::invalid_argument);
        CHECK_THROWS_AS(partial_trace(rho, three, {5}), std::out_of_range);
    }
}

TEST_CASE("von Neumann entropy") {
    SUBCASE("pure and maximally mixed") {
        Matrix pure = Matrix::Zero(4, 4);
        pure(0, 0) = 1.0;
        CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(von_neumann_entropy(Matrix::Identity(16, 16) / 16.0) ==
              doctest::Approx(std::log(16.0)));
    }

    SUBCASE("entropy additivity on product states") {
        std::mt19937 rng(7004);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        Eigen::Vector2d pa(u(rng), u(rng));
        pa /= pa.sum();
        Eigen::Vector3d pb(u(rng), u(rng), u(rng));
        pb /= pb.sum();
        Matrix rho_a = Matrix::Zero(2, 2), rho_b = Matrix::Zero(3, 3);
        rho_a.diagonal() << pa(0), pa(1);
        rho_b.diagonal() << pb(0), pb(1), pb(2);
        const double s_joint = von_neumann_entropy(kron(rho_a, rho_b));
        CHECK(s_joint ==
              doctest::Approx(von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b)).epsilon(1e-10));
    }

    SUBCASE("clipping and negativity guard") {
        Matrix rho = Matrix::Identity(2, 2);
        rho(0, 0) = 1.0 + 5e-9;
        rho(1, 1) = -5e-9;  // within the -1e-8 floor
        CHECK(von_neumann_entropy(rho) >= 0.0);
        rho(1, 1) = -1e-6;
        CHECK_THROWS_AS(von_neumann_entropy(rho), std::invalid_argument);
    }
}

TEST_CASE("state and density checks") {
    std::mt19937 rng(7005);
    const Vector psi = random_state(8, rng);
    CHECK(is_valid_state(psi));
    CHECK(is_valid_density(psi * psi.adjoint()));
    CHECK_FALSE(is_valid_density(2.0 * (psi * psi.adjoint())));

    const Vector phi = random_state(8, rng);
    const double d = trace_distance(psi * psi.adjoint(), phi * phi.adjoint());
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 + 1e-12);
    CHECK(trace_distance(psi * psi.adjoint(), psi * psi.adjoint()) <= 1e-14);
}
