#include "lgtsim/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lgtsim::redfield {

namespace {

// union-find over frequency clusters
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

// ------------------------------ eigenoperators ------------------------------

int EigenOperatorSet::zero_bin() const {
    auto it = std::lower_bound(bin_rep.begin(), bin_rep.end(), 0.0);
    if (it == bin_rep.end() || *it != 0.0)
        throw std::logic_error("EigenOperatorSet: zero bin missing");
    return static_cast<int>(it - bin_rep.begin());
}

Matrix EigenOperatorSet::reconstruct(int jump) const {
    if (jump < 0 || jump >= static_cast<int>(blocks.size()))
        throw std::out_of_range("reconstruct: jump index out of range");
    Matrix out = Matrix::Zero(dim(), dim());
    for (const EigenOperatorBlock& blk : blocks[jump])
        for (size_t e = 0; e < blk.val.size(); ++e) out(blk.row[e], blk.col[e]) += blk.val[e];
    return out;
}

EigenOperatorSet decompose_eigenoperators(const Operator& hamiltonian,
                                          const std::vector<Operator>& jumps, double bin_tol) {
    for (const Operator& j : jumps)
        if (!j.hermitian || !is_hermitian(j.mat, 1e-12 * std::max(1.0, max_abs(j.mat))))
            throw std::invalid_argument("decompose_eigenoperators: jump operators must be Hermitian");

    EigenOperatorSet set;
    set.eig = hermitian_eig(hamiltonian);
    const int d = set.dim();
    const Eigen::VectorXd& eps = set.eig.eigenvalues;
    set.spectral_range = eps(d - 1) - eps(0);
    set.bin_tol = bin_tol > 0 ? bin_tol : std::max(1e-8 * set.spectral_range, 1e-12);

    // single-linkage clustering of all Bohr frequencies eps_m - eps_n;
    // value at flat index n + d*m belongs to entry (n, m)
    const long np = static_cast<long>(d) * d;
    std::vector<double> freq(np);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) freq[n + static_cast<long>(d) * m] = eps(m) - eps(n);

    std::vector<long> order(np);
    std::iota(order.begin(), order.end(), 0L);
    std::sort(order.begin(), order.end(), [&](long a, long b) { return freq[a] < freq[b]; });

    set.bin_of.resize(d, d);
    std::vector<double> bin_min, bin_max, bin_sum;
    std::vector<long> bin_count;
    int nbins = 0;
    for (long k = 0; k < np; ++k) {
        const double v = freq[order[k]];
        if (k == 0 || v - freq[order[k - 1]] > set.bin_tol) {
            bin_min.push_back(v);
            bin_max.push_back(v);
            bin_sum.push_back(0.0);
            bin_count.push_back(0);
            ++nbins;
        }
        bin_max[nbins - 1] = v;
        bin_sum[nbins - 1] += v;
        bin_count[nbins - 1] += 1;
        set.bin_of.data()[order[k]] = nbins - 1;
    }

    // representatives: count-weighted means, exactly +-mirrored, zero snapped.
    // the frequency multiset is symmetric under negation, so bin b mirrors
    // bin nbins-1-b
    set.bin_rep.resize(nbins);
    set.bin_width.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        set.bin_rep[b] = bin_sum[b] / static_cast<double>(bin_count[b]);
        set.bin_width[b] = bin_max[b] - bin_min[b];
    }
    for (int b = 0; b < nbins / 2; ++b) {
        const int mb = nbins - 1 - b;
        if (std::abs(set.bin_rep[b] + set.bin_rep[mb]) > set.bin_tol)
            throw std::logic_error("decompose_eigenoperators: frequency bins are not mirror-symmetric");
        set.bin_rep[b] = -set.bin_rep[mb];
    }
    if (nbins % 2 == 1) set.bin_rep[nbins / 2] = 0.0;
    else throw std::logic_error("decompose_eigenoperators: no zero-frequency bin");

    // rotate each jump and bucket entries by bin
    set.blocks.resize(jumps.size());
    for (size_t a = 0; a < jumps.size(); ++a) {
        Matrix rotated = set.eig.eigenvectors.adjoint() * jumps[a].mat * set.eig.eigenvectors;
        const double keep_tol = 1e-14 * std::max(1.0, max_abs(rotated));

        std::vector<EigenOperatorBlock> blocks(nbins);
        for (int b = 0; b < nbins; ++b) {
            blocks[b].bin = b;
            blocks[b].omega = set.bin_rep[b];
        }
        // row-major scan keeps each block's entries grouped by row
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                const Complex v = rotated(n, m);
                if (std::abs(v) <= keep_tol) continue;
                EigenOperatorBlock& blk = blocks[set.bin_of(n, m)];
                blk.row.push_back(n);
                blk.col.push_back(m);
                blk.val.push_back(v);
            }
        }
        for (EigenOperatorBlock& blk : blocks)
            if (!blk.val.empty()) set.blocks[a].push_back(std::move(blk));
    }
    return set;
}

// --------------------------------- assembly --------------------------------

namespace {

struct PreparedRates {
    // rate per (jump, populated-block) in the same order as eset.blocks
    std::vector<std::vector<double>> rate;
    double max_rate = 0.0;
};

PreparedRates prepare_rates(const EigenOperatorSet& eset, const std::vector<noise::Spectrum>& spectra,
                            const GeneratorOptions& opts) {
    if (spectra.size() != eset.blocks.size())
        throw std::invalid_argument("assemble_generator: one spectrum per jump operator required");
    for (const noise::Spectrum& s : spectra) s.validate();

    PreparedRates out;
    out.rate.resize(eset.blocks.size());
    for (size_t a = 0; a < eset.blocks.size(); ++a) {
        out.rate[a].reserve(eset.blocks[a].size());
        for (const EigenOperatorBlock& blk : eset.blocks[a]) {
            double s = spectra[a](blk.omega);
            if (s < 0)
                throw std::runtime_error("assemble_generator: negative rate from spectrum at omega = " +
                                         std::to_string(blk.omega));
            if (opts.drop_zero_frequency && blk.omega == 0.0) s = 0.0;
            out.rate[a].push_back(s);
            out.max_rate = std::max(out.max_rate, s);
        }
    }
    return out;
}

Matrix dense_from_tensor(const EigenOperatorSet& eset, const std::vector<noise::Spectrum>& spectra,
                         bool secular, bool drop_zero_frequency) {
    const int d = eset.dim();
    const long d2 = static_cast<long>(d) * d;
    const Eigen::VectorXd& eps = eset.eig.eigenvalues;

    // per-jump rate at every bin representative, matching the generator
    std::vector<std::vector<double>> rate_by_bin(spectra.size(),
                                                 std::vector<double>(eset.bin_rep.size(), 0.0));
    for (size_t a = 0; a < spectra.size(); ++a)
        for (size_t b = 0; b < eset.bin_rep.size(); ++b) {
            double s = spectra[a](eset.bin_rep[b]);
            if (drop_zero_frequency && eset.bin_rep[b] == 0.0) s = 0.0;
            rate_by_bin[a][b] = s;
        }

    auto rate_at = [&](size_t a, int n, int m) {
        // S_a at the (binned or raw) frequency of entry (n, m): omega = eps_m - eps_n
        if (secular) return rate_by_bin[a][eset.bin_of(n, m)];
        return spectra[a](eps(m) - eps(n));
    };

    Matrix sup = Matrix::Zero(d2, d2);
    auto idx = [d](int r, int c) { return static_cast<long>(r) + static_cast<long>(d) * c; };

    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            sup(idx(a, b), idx(a, b)) += Complex(0.0, -(eps(a) - eps(b)));

    for (size_t al = 0; al < eset.blocks.size(); ++al) {
        Matrix rot = eset.reconstruct(static_cast<int>(al));

        // golden-rule style sums M(a,c) = sum_n conj(rot(n,a)) rot(n,c) S(omega_cn)
        Matrix m = Matrix::Zero(d, d);
        for (int aa = 0; aa < d; ++aa)
            for (int cc = 0; cc < d; ++cc) {
                Complex acc(0, 0);
                for (int n = 0; n < d; ++n) {
                    if (secular && eset.bin_of(n, aa) != eset.bin_of(n, cc)) continue;
                    acc += std::conj(rot(n, aa)) * rot(n, cc) * rate_at(al, n, cc);
                }
                m(aa, cc) = acc;
            }

        for (int aa = 0; aa < d; ++aa)
            for (int cc = 0; cc < d; ++cc) {
                if (m(aa, cc) != Complex(0, 0))
                    for (int b = 0; b < d; ++b) sup(idx(aa, b), idx(cc, b)) -= 0.5 * m(aa, cc);
                if (m(cc, aa) != Complex(0, 0))
                    for (int b = 0; b < d; ++b) sup(idx(b, aa), idx(b, cc)) -= 0.5 * m(cc, aa);
            }

        // sandwich: L[(a,b),(c,dd)] += S * rot(a,c) conj(rot(b,dd))
        for (int aa = 0; aa < d; ++aa)
            for (int cc = 0; cc < d; ++cc) {
                if (rot(aa, cc) == Complex(0, 0)) continue;
                for (int b = 0; b < d; ++b)
                    for (int dd = 0; dd < d; ++dd) {
                        if (rot(b, dd) == Complex(0, 0)) continue;
                        if (secular && eset.bin_of(aa, cc) != eset.bin_of(b, dd)) continue;
                        const double s = secular ? rate_at(al, aa, cc)
                                                 : 0.5 * (rate_at(al, aa, cc) + rate_at(al, b, dd));
                        sup(idx(aa, b), idx(cc, dd)) += s * rot(aa, cc) * std::conj(rot(b, dd));
                    }
            }
    }
    return sup;
}

}  // namespace

RedfieldGenerator assemble_generator(const EigenOperatorSet& eset,
                                     const std::vector<noise::Spectrum>& spectra,
                                     const GeneratorOptions& opts) {
    const int d = eset.dim();
    RedfieldGenerator gen;
    gen.dim_ = d;
    gen.secular_ = opts.secular;
    gen.drop_zero_ = opts.drop_zero_frequency;
    gen.eig_ = eset.eig;
    gen.bin_tol_ = eset.bin_tol;

    PreparedRates rates = prepare_rates(eset, spectra, opts);
    gen.max_rate_ = rates.max_rate;
    gen.eset_ = std::make_shared<const EigenOperatorSet>(eset);
    gen.spectra_ = spectra;

    const Eigen::VectorXd& eps = eset.eig.eigenvalues;

    if (!opts.secular) {
        if (d > opts.dense_dim_limit)
            throw std::invalid_argument("assemble_generator: non-secular form limited to small dimensions");
        gen.dense_ = std::make_shared<Matrix>(dense_from_tensor(eset, spectra, false, false));
        return gen;
    }

    // ---- choose materialized vs runtime blocks (smallest bins first) ----
    struct BlockRef {
        size_t jump;
        size_t pos;
        long entries;
    };
    std::vector<BlockRef> refs;
    for (size_t a = 0; a < eset.blocks.size(); ++a)
        for (size_t p = 0; p < eset.blocks[a].size(); ++p)
            refs.push_back({a, p, static_cast<long>(eset.blocks[a][p].val.size())});
    std::stable_sort(refs.begin(), refs.end(),
                     [](const BlockRef& x, const BlockRef& y) { return x.entries < y.entries; });

    std::vector<std::vector<bool>> materialize(eset.blocks.size());
    for (size_t a = 0; a < eset.blocks.size(); ++a) materialize[a].assign(eset.blocks[a].size(), false);
    long budget = opts.coupling_budget;
    for (const BlockRef& r : refs) {
        const long cost = r.entries * r.entries;
        if (cost <= budget) {
            materialize[r.jump][r.pos] = true;
            budget -= cost;
        }
    }

    // runtime blocks rely on negligible in-bin frequency spread (exact
    // degeneracies); materialized couplings are checked individually
    for (size_t a = 0; a < eset.blocks.size(); ++a)
        for (size_t p = 0; p < eset.blocks[a].size(); ++p)
            if (!materialize[a][p] && eset.bin_width[eset.blocks[a][p].bin] > eset.bin_tol)
                throw std::runtime_error(
                    "assemble_generator: wide frequency bin too large to materialize; increase bin_tol");

    // ---- pass 1: anticommutator matrix M and cluster merges ----
    const int nbins = static_cast<int>(eset.bin_rep.size());
    DisjointSets groups(nbins);
    auto pair_bin = [&](int a, int b) { return eset.bin_of(b, a); };  // bin of omega_ab

    Matrix m_full = Matrix::Zero(d, d);
    for (size_t a = 0; a < eset.blocks.size(); ++a) {
        for (size_t p = 0; p < eset.blocks[a].size(); ++p) {
            const EigenOperatorBlock& blk = eset.blocks[a][p];
            const double s = rates.rate[a][p];
            if (s == 0.0) continue;
            // entries are grouped by row; accumulate M over same-row pairs
            size_t i = 0;
            while (i < blk.val.size()) {
                size_t j = i;
                while (j < blk.val.size() && blk.row[j] == blk.row[i]) ++j;
                for (size_t x = i; x < j; ++x)
                    for (size_t y = i; y < j; ++y)
                        m_full(blk.col[x], blk.col[y]) += s * std::conj(blk.val[x]) * blk.val[y];
                i = j;
            }
            if (materialize[a][p]) {
                for (size_t x = 0; x < blk.val.size(); ++x)
                    for (size_t y = 0; y < blk.val.size(); ++y) {
                        const int dst = pair_bin(blk.row[x], blk.row[y]);
                        const int src = pair_bin(blk.col[x], blk.col[y]);
                        if (dst != src) groups.unite(dst, src);
                    }
            }
        }
    }

    // off-diagonal M entries couple (a, b) <- (c, b); merge their clusters
    const double m_scale = std::max(1e-300, max_abs(m_full));
    for (int aa = 0; aa < d; ++aa)
        for (int cc = 0; cc < d; ++cc) {
            if (aa == cc || std::abs(m_full(aa, cc)) <= 1e-16 * m_scale) continue;
            for (int b = 0; b < d; ++b) {
                const int u = pair_bin(aa, b), v = pair_bin(cc, b);
                if (u != v) groups.unite(u, v);
                const int u2 = pair_bin(b, aa), v2 = pair_bin(b, cc);
                if (u2 != v2) groups.unite(u2, v2);
            }
        }

    // ---- group representatives (count-weighted, mirrored, zero snapped) ----
    std::vector<long> bin_count(nbins, 0);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) bin_count[eset.bin_of(n, m)] += 1;

    std::vector<double> group_sum(nbins, 0.0);
    std::vector<long> group_count(nbins, 0);
    for (int b = 0; b < nbins; ++b) {
        const int g = groups.find(b);
        group_sum[g] += eset.bin_rep[b] * static_cast<double>(bin_count[b]);
        group_count[g] += bin_count[b];
    }
    std::vector<double> rep_of_bin(nbins);
    for (int b = 0; b < nbins; ++b) {
        const int g = groups.find(b);
        rep_of_bin[b] = group_sum[g] / static_cast<double>(group_count[g]);
    }
    // mirror symmetry: bin b mirrors nbins-1-b
    for (int b = 0; b < nbins / 2; ++b) rep_of_bin[b] = -rep_of_bin[nbins - 1 - b];
    rep_of_bin[nbins / 2] = 0.0;
    {
        // groups that straddle the mirror or contain the zero bin pin to 0
        const int zg = groups.find(nbins / 2);
        for (int b = 0; b < nbins; ++b)
            if (groups.find(b) == zg) rep_of_bin[b] = 0.0;
    }

    gen.omega_rep_.resize(d, d);
    gen.diag_term_.resize(d, d);
    for (int b = 0; b < d; ++b)
        for (int aa = 0; aa < d; ++aa) {
            const double rep = rep_of_bin[pair_bin(aa, b)];
            gen.omega_rep_(aa, b) = rep;
            const double omega = eps(aa) - eps(b);
            gen.diag_term_(aa, b) =
                Complex(-0.5 * (m_full(aa, aa).real() + m_full(b, b).real()), -(omega - rep));
        }

    // ---- pass 2: materialized couplings and runtime sandwiches ----
    struct Coupling {
        int32_t dst;
        int32_t src;
        Complex val;
    };
    std::vector<Coupling> couplings;

    for (size_t a = 0; a < eset.blocks.size(); ++a) {
        for (size_t p = 0; p < eset.blocks[a].size(); ++p) {
            const EigenOperatorBlock& blk = eset.blocks[a][p];
            const double s = rates.rate[a][p];
            if (s == 0.0) continue;
            if (materialize[a][p]) {
                for (size_t x = 0; x < blk.val.size(); ++x)
                    for (size_t y = 0; y < blk.val.size(); ++y) {
                        const int32_t dst = blk.row[x] + d * blk.row[y];
                        const int32_t src = blk.col[x] + d * blk.col[y];
                        couplings.push_back({dst, src, s * blk.val[x] * std::conj(blk.val[y])});
                    }
            } else {
                RedfieldGenerator::SandwichBlock sb;
                sb.rate = s;
                sb.row = blk.row;
                sb.col = blk.col;
                sb.val = blk.val;
                gen.sandwiches_.push_back(std::move(sb));
            }
        }
    }

    std::sort(couplings.begin(), couplings.end(), [](const Coupling& x, const Coupling& y) {
        return x.dst != y.dst ? x.dst < y.dst : x.src < y.src;
    });
    gen.c_dst_.reserve(couplings.size());
    gen.c_src_.reserve(couplings.size());
    gen.c_val_.reserve(couplings.size());
    for (const Coupling& c : couplings) {
        if (!gen.c_val_.empty() && gen.c_dst_.back() == c.dst && gen.c_src_.back() == c.src) {
            gen.c_val_.back() += c.val;
        } else {
            gen.c_dst_.push_back(c.dst);
            gen.c_src_.push_back(c.src);
            gen.c_val_.push_back(c.val);
        }
    }

    for (int aa = 0; aa < d; ++aa)
        for (int cc = 0; cc < d; ++cc) {
            if (aa == cc || std::abs(m_full(aa, cc)) <= 1e-16 * m_scale) continue;
            gen.m_row_.push_back(aa);
            gen.m_col_.push_back(cc);
            gen.m_val_.push_back(m_full(aa, cc));
        }

    return gen;
}

// --------------------------------- evaluation --------------------------------

void RedfieldGenerator::apply_envelope(const Matrix& sigma, Matrix& out) const {
    const int d = dim_;
    if (sigma.rows() != d || sigma.cols() != d)
        throw std::invalid_argument("apply_envelope: dimension mismatch");
    if (dense_) {
        // non-secular dense path works on the bare eigenbasis matrix
        Eigen::Map<const Vector> v(sigma.data(), static_cast<long>(d) * d);
        Vector w = (*dense_) * v;
        out = Eigen::Map<const Matrix>(w.data(), d, d);
        return;
    }

    out = diag_term_.array() * sigma.array();

    const Complex* src_data = sigma.data();
    Complex* dst_data = out.data();
    for (size_t k = 0; k < c_val_.size(); ++k) dst_data[c_dst_[k]] += c_val_[k] * src_data[c_src_[k]];

    if (!sandwiches_.empty()) {
        Matrix sigma_t = sigma.transpose();
        Matrix tmp_t(d, d), tmp(d, d);
        for (const SandwichBlock& sb : sandwiches_) {
            // tmp = A sigma, computed transposed for contiguous columns
            tmp_t.setZero();
            for (size_t e = 0; e < sb.val.size(); ++e)
                tmp_t.col(sb.row[e]) += sb.val[e] * sigma_t.col(sb.col[e]);
            tmp = tmp_t.transpose();
            for (size_t e = 0; e < sb.val.size(); ++e)
                out.col(sb.row[e]) += (sb.rate * std::conj(sb.val[e])) * tmp.col(sb.col[e]);
        }
    }

    for (size_t e = 0; e < m_val_.size(); ++e) {
        const int a = m_row_[e], c = m_col_[e];
        out.row(a) -= (0.5 * m_val_[e]) * sigma.row(c);
        out.col(c) -= (0.5 * m_val_[e]) * sigma.col(a);
    }
}

Matrix RedfieldGenerator::apply(const Matrix& rho_eig) const {
    Matrix out(dim_, dim_);
    apply_envelope(rho_eig, out);
    if (!dense_) {
        out.array() -= Complex(0, 1) * omega_rep_.array().cast<Complex>() * rho_eig.array();
    }
    return out;
}

void RedfieldGenerator::envelope_phases(double t, Matrix& phases) const {
    const int d = dim_;
    phases.resize(d, d);
    if (dense_) {
        phases.setOnes();
        return;
    }
    const double* w = omega_rep_.data();
    Complex* p = phases.data();
    const long n = static_cast<long>(d) * d;
    for (long k = 0; k < n; ++k) p[k] = std::polar(1.0, -w[k] * t);
}

Matrix RedfieldGenerator::to_eigenbasis(const Matrix& rho_comp) const {
    return eig_.eigenvectors.adjoint() * rho_comp * eig_.eigenvectors;
}

Matrix RedfieldGenerator::to_computational(const Matrix& rho_eig) const {
    return eig_.eigenvectors * rho_eig * eig_.eigenvectors.adjoint();
}

// --------------------------------- diagnostics -------------------------------

ValidityReport validity_check(const EigenOperatorSet& eset,
                              const std::vector<noise::Spectrum>& spectra, double threshold) {
    if (spectra.size() != eset.blocks.size())
        throw std::invalid_argument("validity_check: one spectrum per jump operator required");
    const int d = eset.dim();

    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(d, d);
    for (size_t a = 0; a < eset.blocks.size(); ++a) {
        for (const EigenOperatorBlock& blk : eset.blocks[a]) {
            if (std::abs(blk.omega) <= eset.bin_tol) continue;
            const double s = spectra[a](blk.omega);
            for (size_t e = 0; e < blk.val.size(); ++e) {
                if (std::abs(blk.val[e]) <= 1e-12) continue;
                gamma(blk.row[e], blk.col[e]) += std::norm(blk.val[e]) * s;
            }
        }
    }

    ValidityReport report;
    report.threshold = threshold;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            if (gamma(n, m) == 0.0) continue;
            const double omega = eset.bin_rep[eset.bin_of(n, m)];
            if (std::abs(omega) <= eset.bin_tol) continue;
            report.n_checked += 1;
            const double ratio = gamma(n, m) / std::abs(omega);
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.worst_i = m;
                report.worst_f = n;
                report.worst_rate = gamma(n, m);
                report.worst_omega = omega;
            }
        }
    report.pass = report.max_ratio < threshold;
    return report;
}

Matrix dense_superoperator(const RedfieldGenerator& gen) {
    if (gen.dim_ > 32)
        throw std::invalid_argument("dense_superoperator: guarded to dimension <= 32");
    if (gen.dense_) return *gen.dense_;
    if (!gen.eset_) throw std::logic_error("dense_superoperator: generator carries no eigenoperator data");
    return dense_from_tensor(*gen.eset_, gen.spectra_, gen.secular_, gen.drop_zero_);
}

}  // namespace lgtsim::redfield
