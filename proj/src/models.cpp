#include "lgtsim/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lgtsim::models {

namespace {

constexpr double kCommTol = 1e-10;

// link spin-1/2 operators: s = sigma / 2, s^± = sigma^±
Matrix s_z() { return 0.5 * pauli::sigma_z(); }
Matrix s_x() { return 0.5 * pauli::sigma_x(); }

int next_site(int j, int L) { return j == L ? 1 : j + 1; }
int prev_site(int j, int L) { return j == 1 ? L : j - 1; }

void verify_gauge_symmetry(const ModelBundle& bundle) {
    const double scale = std::max(1.0, max_abs(bundle.h0.mat));
    for (size_t j = 0; j < bundle.generators.size(); ++j) {
        const double err = max_abs(comm(bundle.h0.mat, bundle.generators[j].mat));
        if (err > kCommTol * scale)
            throw std::runtime_error("model build: [H0, G_" + std::to_string(j + 1) +
                                     "] = " + std::to_string(err));
    }
}

Vector product_state(const LatticeSpec& lattice, const std::vector<Vector>& locals) {
    Vector out = Vector::Ones(1);
    for (const Vector& v : locals) {
        Vector next(out.size() * v.size());
        for (Eigen::Index a = 0; a < out.size(); ++a)
            for (Eigen::Index b = 0; b < v.size(); ++b) next(a * v.size() + b) = out(a) * v(b);
        out.swap(next);
    }
    if (out.size() != lattice.dim()) throw std::logic_error("product_state: size mismatch");
    return out;
}

Vector local_up() { return (Vector(2) << 1, 0).finished(); }
Vector local_dn() { return (Vector(2) << 0, 1).finished(); }
Vector local_xp() { return (Vector(2) << 1, 1).finished() / std::sqrt(2.0); }
Vector local_xm() { return (Vector(2) << 1, -1).finished() / std::sqrt(2.0); }

// tau^x link eigenvalues t satisfying (-1)^{n_j} t_{j-1,j} t_{j,j+1} = g_tar
// for all j on a periodic chain; t[k] is the link (k+1, k+2), t[L-1] closes
// the ring. Returns empty if the seed admits no consistent assignment.
std::vector<int> propagate_x_links(const std::vector<int>& occupation, int g_target, int seed) {
    const int L = static_cast<int>(occupation.size());
    std::vector<int> t(L, 0);
    t[L - 1] = seed;
    for (int j = 1; j < L; ++j) {
        const int sign = occupation[j - 1] == 1 ? -1 : 1;
        const int left = t[(j + L - 2) % L];  // link (j-1, j); wraps to (L, 1) for j = 1
        t[j - 1] = g_target * sign * left;
    }
    for (int j = 1; j <= L; ++j) {
        const int sign = occupation[j - 1] == 1 ? -1 : 1;
        if (sign * t[(j + L - 2) % L] * t[j - 1] != g_target) return {};
    }
    return t;
}

}  // namespace

// ----------------------------- protection sequences ------------------------

ProtectionSequence make_sequence(SequenceKind kind, int n_sites) {
    ProtectionSequence seq;
    seq.kind = kind;
    seq.c.resize(n_sites);
    switch (kind) {
        case SequenceKind::compliant_l4:
            if (n_sites != 4) throw std::invalid_argument("compliant_l4 sequence requires L = 4");
            seq.c = {-115.0 / 122.0, 116.0 / 122.0, -118.0 / 122.0, 1.0};
            break;
        case SequenceKind::staggered:
            for (int j = 1; j <= n_sites; ++j) seq.c[j - 1] = (j % 2 == 0) ? 1.0 : -1.0;
            break;
        case SequenceKind::stark_staggered:
            for (int j = 1; j <= n_sites; ++j) seq.c[j - 1] = (j % 2 == 0) ? j : -j;
            break;
        case SequenceKind::stark_linear:
            for (int j = 1; j <= n_sites; ++j) seq.c[j - 1] = j;
            break;
        case SequenceKind::z2_geometric:
            for (int j = 1; j <= n_sites; ++j) seq.c[j - 1] = (std::pow(-6.0, j) + 5.0) / 11.0;
            break;
        case SequenceKind::custom:
            throw std::invalid_argument("make_sequence: use custom_sequence for explicit coefficients");
    }
    return seq;
}

ProtectionSequence custom_sequence(std::vector<double> c) {
    if (c.empty()) throw std::invalid_argument("custom_sequence: empty coefficient list");
    ProtectionSequence seq;
    seq.kind = SequenceKind::custom;
    seq.c = std::move(c);
    return seq;
}

SequenceKind sequence_kind_from_string(const std::string& name) {
    if (name == "compliant_L4" || name == "compliant_l4") return SequenceKind::compliant_l4;
    if (name == "staggered") return SequenceKind::staggered;
    if (name == "stark_staggered") return SequenceKind::stark_staggered;
    if (name == "stark_linear") return SequenceKind::stark_linear;
    if (name == "z2_geometric") return SequenceKind::z2_geometric;
    if (name.rfind("custom", 0) == 0) return SequenceKind::custom;
    throw std::invalid_argument("unknown protection sequence: " + name);
}

std::string to_string(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::compliant_l4: return "compliant_L4";
        case SequenceKind::staggered: return "staggered";
        case SequenceKind::stark_staggered: return "stark_staggered";
        case SequenceKind::stark_linear: return "stark_linear";
        case SequenceKind::z2_geometric: return "z2_geometric";
        case SequenceKind::custom: return "custom";
    }
    return "?";
}

// --------------------------------- builders --------------------------------

ModelBundle build_u1_qlm(const U1Params& params) {
    if (params.J <= 0) throw std::invalid_argument("build_u1_qlm: J must be positive");
    if (params.L < 2) throw std::invalid_argument("build_u1_qlm: L must be at least 2");
    if (params.boundary == Boundary::periodic && params.L % 2 != 0)
        throw std::invalid_argument("build_u1_qlm: periodic chain requires even L (staggering)");

    ModelBundle b;
    b.kind = ModelKind::u1_qlm;
    b.lattice = LatticeSpec::chain(params.L, params.boundary);
    b.J = params.J;
    b.mass_or_field = params.mu;
    const LatticeSpec& lat = b.lattice;
    const int L = params.L;

    Matrix h = Matrix::Zero(lat.dim(), lat.dim());
    const int n_bonds = (params.boundary == Boundary::periodic) ? L : L - 1;
    for (int j = 1; j <= n_bonds; ++j) {
        Matrix hop = embed_local(lat, lat.matter_subsystem(j), pauli::sigma_minus()).mat *
                     embed_local(lat, lat.link_subsystem(j), pauli::sigma_plus()).mat *
                     embed_local(lat, lat.matter_subsystem(next_site(j, L)), pauli::sigma_minus()).mat;
        h += params.J * (hop + hop.adjoint());
    }
    for (int j = 1; j <= L; ++j)
        h += 0.5 * params.mu * embed_local(lat, lat.matter_subsystem(j), pauli::sigma_z()).mat;
    b.h0 = make_hermitian_operator(std::move(h));

    for (int j = 1; j <= L; ++j) {
        Matrix g = Matrix::Zero(lat.dim(), lat.dim());
        if (params.boundary == Boundary::periodic || j > 1)
            g += embed_local(lat, lat.link_subsystem(params.boundary == Boundary::periodic ? prev_site(j, L) : j - 1), s_z()).mat;
        if (params.boundary == Boundary::periodic || j < L)
            g += embed_local(lat, lat.link_subsystem(j), s_z()).mat;
        g += 0.5 * (embed_local(lat, lat.matter_subsystem(j), pauli::sigma_z()).mat +
                    identity_op(lat));
        const double parity = (j % 2 == 0) ? 1.0 : -1.0;
        b.generators.push_back(make_hermitian_operator(parity * g));
    }

    for (int j = 1; j <= L; ++j)
        b.jump_ops.push_back({"matter_" + std::to_string(j),
                              embed_local(lat, lat.matter_subsystem(j), pauli::sigma_x())});
    for (int j = 1; j <= lat.n_links; ++j)
        b.jump_ops.push_back({"gauge_" + std::to_string(j),
                              embed_local(lat, lat.link_subsystem(j), s_x())});

    b.target_sector.assign(L, 0);
    verify_gauge_symmetry(b);
    return b;
}

ModelBundle build_z2_lgt(const Z2Params& params) {
    if (params.J <= 0) throw std::invalid_argument("build_z2_lgt: J must be positive");
    if (params.L < 2) throw std::invalid_argument("build_z2_lgt: L must be at least 2");

    ModelBundle b;
    b.kind = ModelKind::z2_lgt;
    b.lattice = LatticeSpec::chain(params.L, params.boundary);
    b.J = params.J;
    b.mass_or_field = params.h;
    const LatticeSpec& lat = b.lattice;
    const int L = params.L;

    // hardcore bosons mapped to spins: a^dag = sigma^+, a = sigma^-
    Matrix h = Matrix::Zero(lat.dim(), lat.dim());
    const int n_bonds = lat.n_links;
    for (int j = 1; j <= n_bonds; ++j) {
        Matrix hop = embed_local(lat, lat.matter_subsystem(j), pauli::sigma_plus()).mat *
                     embed_local(lat, lat.link_subsystem(j), pauli::sigma_z()).mat *
                     embed_local(lat, lat.matter_subsystem(next_site(j, L)), pauli::sigma_minus()).mat;
        h += params.J * (hop + hop.adjoint());
        h -= params.h * embed_local(lat, lat.link_subsystem(j), pauli::sigma_x()).mat;
    }
    b.h0 = make_hermitian_operator(std::move(h));

    b.target_sector.assign(L, 1);
    for (int j = 1; j <= L; ++j) {
        // (-1)^{n_j} = 1 - 2 n_j
        Matrix parity = identity_op(lat) - 2.0 * embed_local(lat, lat.matter_subsystem(j), pauli::number()).mat;
        Matrix g = parity;
        if (params.boundary == Boundary::periodic || j > 1)
            g = g * embed_local(lat, lat.link_subsystem(params.boundary == Boundary::periodic ? prev_site(j, L) : j - 1), pauli::sigma_x()).mat;
        if (params.boundary == Boundary::periodic || j < L)
            g = g * embed_local(lat, lat.link_subsystem(j), pauli::sigma_x()).mat;
        b.generators.push_back(make_hermitian_operator(std::move(g)));

        Matrix w = Matrix::Zero(lat.dim(), lat.dim());
        Matrix tt = identity_op(lat);
        if (params.boundary == Boundary::periodic || j > 1)
            tt = tt * embed_local(lat, lat.link_subsystem(params.boundary == Boundary::periodic ? prev_site(j, L) : j - 1), pauli::sigma_x()).mat;
        if (params.boundary == Boundary::periodic || j < L)
            tt = tt * embed_local(lat, lat.link_subsystem(j), pauli::sigma_x()).mat;
        w = tt + 2.0 * b.target_sector[j - 1] *
                     embed_local(lat, lat.matter_subsystem(j), pauli::number()).mat;
        b.pseudogenerators.push_back(make_hermitian_operator(std::move(w)));
    }

    for (int j = 1; j <= L; ++j)
        b.jump_ops.push_back({"matter_" + std::to_string(j),
                              embed_local(lat, lat.matter_subsystem(j), pauli::sigma_x())});
    for (int j = 1; j <= lat.n_links; ++j)
        b.jump_ops.push_back({"gauge_" + std::to_string(j),
                              embed_local(lat, lat.link_subsystem(j), pauli::sigma_z())});

    verify_gauge_symmetry(b);
    for (const Operator& g : b.generators) {
        if (max_abs(g.mat * g.mat - identity_op(lat)) > 1e-10)
            throw std::runtime_error("build_z2_lgt: generator fails G^2 = 1");
    }
    return b;
}

Operator build_linear_protection(const ModelBundle& bundle, const ProtectionSequence& seq,
                                 GeneratorSource source) {
    const std::vector<Operator>& gens =
        (source == GeneratorSource::pseudo) ? bundle.pseudogenerators : bundle.generators;
    if (source == GeneratorSource::pseudo && gens.empty())
        throw std::invalid_argument("build_linear_protection: model has no pseudogenerators");
    if (seq.c.size() != gens.size())
        throw std::invalid_argument("build_linear_protection: sequence length mismatch");

    Matrix h = Matrix::Zero(bundle.lattice.dim(), bundle.lattice.dim());
    for (size_t j = 0; j < gens.size(); ++j) h += seq.c[j] * gens[j].mat;
    return make_hermitian_operator(std::move(h));
}

Operator build_quadratic_protection(const ModelBundle& bundle) {
    Matrix h = Matrix::Zero(bundle.lattice.dim(), bundle.lattice.dim());
    const Matrix id = identity_op(bundle.lattice);
    for (size_t j = 0; j < bundle.generators.size(); ++j) {
        Matrix shifted = bundle.generators[j].mat - double(bundle.target_sector[j]) * id;
        h += shifted * shifted;
    }
    return make_hermitian_operator(std::move(h));
}

Operator violation_operator(const ModelBundle& bundle) {
    Operator q = build_quadratic_protection(bundle);
    q.mat /= double(bundle.generators.size());
    return q;
}

Operator build_coherent_error(const ModelBundle& bundle, const std::array<double, 4>& eta) {
    const LatticeSpec& lat = bundle.lattice;
    const int L = lat.n_matter;
    const int n_bonds = lat.n_links;
    Matrix h = Matrix::Zero(lat.dim(), lat.dim());

    if (bundle.kind == ModelKind::u1_qlm) {
        const double norm = std::sqrt(0.5 * 1.5);  // sqrt(S(S+1)), S = 1/2
        for (int j = 1; j <= n_bonds; ++j) {
            Matrix pair_m = embed_local(lat, lat.matter_subsystem(j), pauli::sigma_minus()).mat *
                            embed_local(lat, lat.matter_subsystem(next_site(j, L)), pauli::sigma_minus()).mat;
            h += pair_m + pair_m.adjoint();
            h += (embed_local(lat, lat.link_subsystem(j), s_x()).mat +
                  embed_local(lat, lat.link_subsystem(j), s_z()).mat) / norm;
        }
    } else {
        for (int j = 1; j <= n_bonds; ++j) {
            const int jp = next_site(j, L);
            Matrix hop = embed_local(lat, lat.matter_subsystem(j), pauli::sigma_plus()).mat *
                         embed_local(lat, lat.matter_subsystem(jp), pauli::sigma_minus()).mat;
            Matrix link_mix = eta[0] * embed_local(lat, lat.link_subsystem(j), pauli::sigma_plus()).mat +
                              eta[1] * embed_local(lat, lat.link_subsystem(j), pauli::sigma_minus()).mat +
                              identity_op(lat);
            Matrix t = hop * link_mix;
            h += t + t.adjoint();
            Matrix density = eta[2] * embed_local(lat, lat.matter_subsystem(j), pauli::number()).mat -
                             eta[3] * embed_local(lat, lat.matter_subsystem(jp), pauli::number()).mat +
                             identity_op(lat);
            h += density * embed_local(lat, lat.link_subsystem(j), pauli::sigma_z()).mat;
        }
    }

    Operator op = make_hermitian_operator(std::move(h));

    // gauge-breaking by construction
    double worst = 0.0;
    for (const Operator& g : bundle.generators) worst = std::max(worst, max_abs(comm(op.mat, g.mat)));
    if (worst < 1e-6)
        throw std::runtime_error("build_coherent_error: error term unexpectedly commutes with all G_j");
    return op;
}

// ----------------------------- sectors & states ----------------------------

std::vector<Sector> sector_projectors(const ModelBundle& bundle) {
    struct Block {
        Matrix q;
        std::vector<int> g;
    };
    const long dim = bundle.lattice.dim();

    // generators must commute pairwise for a joint eigenbasis to exist
    for (size_t i = 0; i < bundle.generators.size(); ++i)
        for (size_t j = i + 1; j < bundle.generators.size(); ++j)
            if (max_abs(comm(bundle.generators[i].mat, bundle.generators[j].mat)) > 1e-10)
                throw std::runtime_error("sector_projectors: generators do not commute");

    std::vector<Block> blocks;
    blocks.push_back({Matrix::Identity(dim, dim), {}});

    for (const Operator& gen : bundle.generators) {
        std::vector<Block> next;
        for (Block& blk : blocks) {
            Matrix hk = blk.q.adjoint() * (gen.mat * blk.q);
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hk + hk.adjoint()));
            if (es.info() != Eigen::Success)
                throw std::runtime_error("sector_projectors: eigensolver failed");
            const Eigen::VectorXd& vals = es.eigenvalues();
            Eigen::Index i = 0;
            while (i < vals.size()) {
                const int v = static_cast<int>(std::lround(vals(i)));
                if (std::abs(vals(i) - v) > 1e-7)
                    throw std::runtime_error("sector_projectors: non-integer generator eigenvalue");
                Eigen::Index j = i;
                while (j < vals.size() && static_cast<int>(std::lround(vals(j))) == v) ++j;
                Block nb;
                nb.q = blk.q * es.eigenvectors().middleCols(i, j - i);
                nb.g = blk.g;
                nb.g.push_back(v);
                next.push_back(std::move(nb));
                i = j;
            }
        }
        blocks.swap(next);
    }

    std::vector<Sector> sectors;
    sectors.reserve(blocks.size());
    for (Block& blk : blocks) {
        Sector s;
        s.g = blk.g;
        s.rank = static_cast<int>(blk.q.cols());
        s.projector = blk.q * blk.q.adjoint();
        sectors.push_back(std::move(s));
    }
    std::sort(sectors.begin(), sectors.end(),
              [](const Sector& a, const Sector& b) { return a.g < b.g; });

    long total_rank = 0;
    for (const Sector& s : sectors) total_rank += s.rank;
    if (total_rank != dim) throw std::runtime_error("sector_projectors: incomplete decomposition");
    return sectors;
}

ComplianceReport check_compliance(const ProtectionSequence& seq, const std::vector<Sector>& sectors,
                                  const std::vector<int>& target) {
    ComplianceReport report;
    report.compliant = true;
    for (const Sector& s : sectors) {
        if (s.g.size() != seq.c.size() || target.size() != seq.c.size())
            throw std::invalid_argument("check_compliance: length mismatch");
        double value = 0.0;
        bool is_target = true;
        for (size_t j = 0; j < seq.c.size(); ++j) {
            value += seq.c[j] * (s.g[j] - target[j]);
            is_target = is_target && (s.g[j] == target[j]);
        }
        report.rows.push_back({s.g, value});
        if (!is_target && std::abs(value) < 1e-9) report.compliant = false;
    }
    return report;
}

StatePreset preset_from_string(const std::string& name) {
    if (name == "u1_vacuum") return StatePreset::u1_vacuum;
    if (name == "u1_charge_proliferated") return StatePreset::u1_charge_proliferated;
    if (name == "u1_domainwall_x") return StatePreset::u1_domainwall_x;
    if (name == "u1_domainwall_z") return StatePreset::u1_domainwall_z;
    if (name == "z2_cdw") return StatePreset::z2_cdw;
    if (name == "z2_domainwall_x") return StatePreset::z2_domainwall_x;
    if (name == "z2_domainwall_z") return StatePreset::z2_domainwall_z;
    if (name.rfind("custom", 0) == 0) return StatePreset::custom;
    throw std::invalid_argument("unknown initial-state preset: " + name);
}

std::string to_string(StatePreset preset) {
    switch (preset) {
        case StatePreset::u1_vacuum: return "u1_vacuum";
        case StatePreset::u1_charge_proliferated: return "u1_charge_proliferated";
        case StatePreset::u1_domainwall_x: return "u1_domainwall_x";
        case StatePreset::u1_domainwall_z: return "u1_domainwall_z";
        case StatePreset::z2_cdw: return "z2_cdw";
        case StatePreset::z2_domainwall_x: return "z2_domainwall_x";
        case StatePreset::z2_domainwall_z: return "z2_domainwall_z";
        case StatePreset::custom: return "custom";
    }
    return "?";
}

namespace {

std::vector<int> domain_wall_occupation(int L) {
    std::vector<int> n(L, 0);
    for (int j = 1; j <= L / 2; ++j) n[j - 1] = 1;
    return n;
}

void verify_homogeneous(const ModelBundle& bundle, const Vector& psi) {
    for (size_t j = 0; j < bundle.generators.size(); ++j) {
        const Matrix& g = bundle.generators[j].mat;
        Vector shifted = g * psi - double(bundle.target_sector[j]) * psi;
        if (shifted.norm() > 1e-10)
            throw std::runtime_error("build_initial_state: preset not in the target sector at site " +
                                     std::to_string(j + 1));
    }
}

void verify_weight_table(const ModelBundle& bundle, const Vector& psi,
                         const std::map<double, int>& expected_counts) {
    std::vector<Sector> sectors = sector_projectors(bundle);
    std::map<double, int> counts;
    double total = 0.0;
    for (const Sector& s : sectors) {
        const double w = (psi.adjoint() * s.projector * psi)(0).real();
        total += w;
        if (w < 1e-12) continue;
        bool known = false;
        for (const auto& [value, n] : expected_counts) {
            if (std::abs(w - value) <= 1e-12) {
                counts[value] += 1;
                known = true;
                break;
            }
        }
        if (!known)
            throw std::runtime_error("build_initial_state: unexpected sector weight " + std::to_string(w));
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::runtime_error("build_initial_state: sector weights do not sum to 1");
    if (counts != expected_counts)
        throw std::runtime_error("build_initial_state: sector-weight multiset mismatch");
}

}  // namespace

Vector build_initial_state(const ModelBundle& bundle, StatePreset preset,
                           const std::string& bitstring, bool verify) {
    const LatticeSpec& lat = bundle.lattice;
    const int L = lat.n_matter;
    const bool u1 = bundle.kind == ModelKind::u1_qlm;
    std::vector<Vector> locals(lat.subsystems());

    auto set_matter = [&](const std::vector<int>& n) {
        for (int j = 1; j <= L; ++j)
            locals[lat.matter_subsystem(j)] = n[j - 1] == 1 ? local_up() : local_dn();
    };
    auto set_links_x = [&](const std::vector<int>& t) {
        for (int j = 1; j <= lat.n_links; ++j)
            locals[lat.link_subsystem(j)] = t[j - 1] == 1 ? local_xp() : local_xm();
    };

    bool homogeneous = false;
    switch (preset) {
        case StatePreset::u1_vacuum: {
            if (!u1) throw std::invalid_argument("preset u1_vacuum requires the U(1) model");
            set_matter(std::vector<int>(L, 0));
            for (int j = 1; j <= lat.n_links; ++j)
                locals[lat.link_subsystem(j)] = (j % 2 == 1) ? local_dn() : local_up();
            homogeneous = true;
            break;
        }
        case StatePreset::u1_charge_proliferated: {
            if (!u1) throw std::invalid_argument("preset u1_charge_proliferated requires the U(1) model");
            set_matter(std::vector<int>(L, 1));
            for (int j = 1; j <= lat.n_links; ++j) locals[lat.link_subsystem(j)] = local_dn();
            homogeneous = true;
            break;
        }
        case StatePreset::u1_domainwall_z: {
            if (!u1 || lat.boundary != Boundary::periodic)
                throw std::invalid_argument("preset u1_domainwall_z requires the periodic U(1) model");
            const std::vector<int> n = domain_wall_occupation(L);
            set_matter(n);
            // solve s^z_{j-1,j} + s^z_{j,j+1} + n_j = 0 around the ring; t = 2 s^z
            for (int seed : {-1, 1}) {
                std::vector<int> t(L);
                t[L - 1] = seed;
                bool ok = true;
                for (int j = 1; j < L; ++j) {
                    t[j - 1] = -2 * n[j - 1] - t[(j + L - 2) % L];
                    if (t[j - 1] != 1 && t[j - 1] != -1) { ok = false; break; }
                }
                if (ok && t[L - 2] + t[L - 1] + 2 * n[L - 1] != 0) ok = false;
                // recheck all constraints
                if (ok)
                    for (int j = 1; j <= L; ++j)
                        if (t[(j + L - 2) % L] + t[j - 1] + 2 * n[j - 1] != 0) { ok = false; break; }
                if (ok) {
                    for (int j = 1; j <= L; ++j)
                        locals[lat.link_subsystem(j)] = t[j - 1] == 1 ? local_up() : local_dn();
                    break;
                }
                if (seed == 1) throw std::runtime_error("u1_domainwall_z: no consistent link assignment");
            }
            homogeneous = true;
            break;
        }
        case StatePreset::u1_domainwall_x: {
            if (!u1) throw std::invalid_argument("preset u1_domainwall_x requires the U(1) model");
            set_matter(domain_wall_occupation(L));
            for (int j = 1; j <= lat.n_links; ++j) locals[lat.link_subsystem(j)] = local_xp();
            break;
        }
        case StatePreset::z2_cdw: {
            if (u1 || lat.boundary != Boundary::periodic)
                throw std::invalid_argument("preset z2_cdw requires the periodic Z2 model");
            std::vector<int> n(L, 0);
            for (int j = 1; j <= L; j += 2) n[j - 1] = 1;
            set_matter(n);
            std::vector<int> t = propagate_x_links(n, 1, 1);
            if (t.empty()) t = propagate_x_links(n, 1, -1);
            if (t.empty()) throw std::runtime_error("z2_cdw: no consistent link assignment");
            set_links_x(t);
            homogeneous = true;
            break;
        }
        case StatePreset::z2_domainwall_x: {
            if (u1 || lat.boundary != Boundary::periodic)
                throw std::invalid_argument("preset z2_domainwall_x requires the periodic Z2 model");
            const std::vector<int> n = domain_wall_occupation(L);
            set_matter(n);
            std::vector<int> t = propagate_x_links(n, 1, 1);
            if (t.empty()) t = propagate_x_links(n, 1, -1);
            if (t.empty()) throw std::runtime_error("z2_domainwall_x: no consistent link assignment");
            set_links_x(t);
            homogeneous = true;
            break;
        }
        case StatePreset::z2_domainwall_z: {
            if (u1) throw std::invalid_argument("preset z2_domainwall_z requires the Z2 model");
            set_matter(domain_wall_occupation(L));
            for (int j = 1; j <= lat.n_links; ++j) locals[lat.link_subsystem(j)] = local_up();
            break;
        }
        case StatePreset::custom: {
            if (bitstring.size() != static_cast<size_t>(lat.subsystems()))
                throw std::invalid_argument("custom preset: bitstring length must equal subsystem count");
            for (int s = 0; s < lat.subsystems(); ++s) {
                if (bitstring[s] != '0' && bitstring[s] != '1')
                    throw std::invalid_argument("custom preset: bitstring must be over {0,1}");
                locals[s] = bitstring[s] == '1' ? local_up() : local_dn();
            }
            break;
        }
    }

    Vector psi = product_state(lat, locals);
    psi /= psi.norm();

    if (verify) {
        if (homogeneous) {
            verify_homogeneous(bundle, psi);
        } else if (preset == StatePreset::u1_domainwall_x && L == 4) {
            verify_weight_table(bundle, psi, {{0.0625, 14}, {0.125, 1}});
        } else if (preset == StatePreset::z2_domainwall_z && L == 4) {
            verify_weight_table(bundle, psi, {{0.125, 8}});
        }
    }
    return psi;
}

// ------------------------------- local tables ------------------------------

std::vector<Z2LocalRow> z2_local_eigenvalue_table() {
    // patch ordering: [link (j-1,j), matter j, link (j,j+1)], msb-first
    auto kron3 = [](const Matrix& a, const Matrix& b, const Matrix& c) {
        Matrix ab(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) ab.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        Matrix abc(ab.rows() * c.rows(), ab.cols() * c.cols());
        for (int i = 0; i < ab.rows(); ++i)
            for (int j = 0; j < ab.cols(); ++j) abc.block(i * c.rows(), j * c.cols(), c.rows(), c.cols()) = ab(i, j) * c;
        return abc;
    };

    const Matrix id = pauli::id2();
    const Matrix parity = id - 2.0 * pauli::number();  // (-1)^n
    const Matrix g_op = kron3(pauli::sigma_x(), parity, pauli::sigma_x());
    const Matrix tt = kron3(pauli::sigma_x(), id, pauli::sigma_x());
    const Matrix n_mid = kron3(id, pauli::number(), id);

    auto xstate = [](int t) { return t == 1 ? local_xp() : local_xm(); };
    std::vector<Z2LocalRow> rows;
    for (int n : {0, 1}) {
        for (int tl : {-1, 1}) {
            for (int tr : {-1, 1}) {
                Vector psi = Vector::Ones(1);
                for (const Vector& v : {xstate(tl), n == 1 ? local_up() : local_dn(), xstate(tr)}) {
                    Vector next(psi.size() * 2);
                    for (Eigen::Index a = 0; a < psi.size(); ++a)
                        for (int b = 0; b < 2; ++b) next(a * 2 + b) = psi(a) * v(b);
                    psi.swap(next);
                }
                auto expect = [&](const Matrix& op) {
                    return std::lround((psi.adjoint() * op * psi)(0).real());
                };
                Z2LocalRow row;
                row.n = n;
                row.tau_l = tl;
                row.tau_r = tr;
                row.g = static_cast<int>(expect(g_op));
                row.w_tar_m = static_cast<int>(expect(tt - 2.0 * n_mid));
                row.w_tar_p = static_cast<int>(expect(tt + 2.0 * n_mid));
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace lgtsim::models
