#include "lgtsim/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lgtsim::noise {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lorentzian(double omega, double r) { return (1.0 / kPi) * r / (omega * omega + r * r); }

// 15-point Gauss-Kronrod pair (nodes and weights for [-1, 1])
constexpr double kKronrodNodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
constexpr double kKronrodWeights[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299786,
    0.0229353220105292,
};
constexpr double kGaussWeights[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct PanelResult {
    double kronrod;
    double error;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kron = kKronrodWeights[0] * f(mid);
    double gauss = kGaussWeights[0] * f(mid);
    for (int i = 1; i < 8; ++i) {
        const double fl = f(mid - half * kKronrodNodes[i]);
        const double fr = f(mid + half * kKronrodNodes[i]);
        kron += kKronrodWeights[i] * (fl + fr);
        if (i % 2 == 0) gauss += kGaussWeights[i / 2] * (fl + fr);
    }
    return {kron * half, std::abs(kron - gauss) * half};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double rel_tol) {
    struct Panel {
        double a, b, value, error;
    };
    PanelResult whole = gk15(f, a, b);
    std::vector<Panel> stack{{a, b, whole.kronrod, whole.error}};
    double total = whole.kronrod;
    double total_err = whole.error;
    const int max_panels = 4000;
    int panels = 1;
    while (total_err > rel_tol * std::max(std::abs(total), 1e-300)) {
        // split the worst panel
        size_t worst = 0;
        for (size_t i = 1; i < stack.size(); ++i)
            if (stack[i].error > stack[worst].error) worst = i;
        Panel p = stack[worst];
        stack.erase(stack.begin() + static_cast<long>(worst));
        const double mid = 0.5 * (p.a + p.b);
        PanelResult left = gk15(f, p.a, mid);
        PanelResult right = gk15(f, mid, p.b);
        total += left.kronrod + right.kronrod - p.value;
        total_err += left.error + right.error - p.error;
        stack.push_back({p.a, mid, left.kronrod, left.error});
        stack.push_back({mid, p.b, right.kronrod, right.error});
        if (++panels > max_panels)
            throw std::runtime_error("noise: composite-spectrum quadrature did not converge");
    }
    return total;
}

}  // namespace

double eval_power_law(const Spectrum& s, double omega) {
    const double w = std::max(std::abs(omega), s.omega_cutoff);
    return s.gamma / std::pow(w, s.beta);
}

double eval_rtn(const Spectrum& s, double omega) { return lorentzian(omega, s.rate); }

double eval_composite(const Spectrum& s, double omega) {
    if (s.band_lo == s.band_hi) return lorentzian(omega, s.band_lo);

    // normalization of p_alpha(r) = N / r^alpha on [r1, r2]
    double norm;
    if (std::abs(s.alpha - 1.0) < 1e-14) {
        norm = std::log(s.band_hi / s.band_lo);
    } else {
        norm = (std::pow(s.band_hi, 1.0 - s.alpha) - std::pow(s.band_lo, 1.0 - s.alpha)) /
               (1.0 - s.alpha);
    }

    // integrate in u = ln r:  dr = r du
    const double w = std::abs(omega);
    auto integrand = [&](double u) {
        const double r = std::exp(u);
        return lorentzian(w, r) * std::pow(r, -s.alpha) * r;
    };
    return adaptive_gk(integrand, std::log(s.band_lo), std::log(s.band_hi), s.quad_rel_tol) / norm;
}

double Spectrum::operator()(double omega) const {
    switch (kind) {
        case SpectrumKind::power_law: return eval_power_law(*this, omega);
        case SpectrumKind::rtn: return eval_rtn(*this, omega);
        case SpectrumKind::composite: return eval_composite(*this, omega);
        case SpectrumKind::flat: return level;
    }
    return 0.0;
}

void Spectrum::validate() const {
    switch (kind) {
        case SpectrumKind::power_law:
            if (gamma < 0) throw std::invalid_argument("spectrum: gamma must be non-negative");
            if (beta <= 0 || beta >= 2) throw std::invalid_argument("spectrum: beta must be in (0, 2)");
            if (omega_cutoff <= 0) throw std::invalid_argument("spectrum: omega_cutoff must be positive");
            break;
        case SpectrumKind::rtn:
            if (rate <= 0) throw std::invalid_argument("spectrum: switching rate must be positive");
            break;
        case SpectrumKind::composite:
            if (band_lo <= 0 || band_hi < band_lo)
                throw std::invalid_argument("spectrum: need 0 < r1 <= r2");
            if (quad_rel_tol <= 0) throw std::invalid_argument("spectrum: quadrature tolerance must be positive");
            break;
        case SpectrumKind::flat:
            if (level < 0) throw std::invalid_argument("spectrum: flat level must be non-negative");
            break;
    }
}

Spectrum Spectrum::power_law(double gamma, double beta, double omega_cutoff) {
    Spectrum s;
    s.kind = SpectrumKind::power_law;
    s.gamma = gamma;
    s.beta = beta;
    s.omega_cutoff = omega_cutoff;
    s.validate();
    return s;
}

Spectrum Spectrum::lorentzian(double rate) {
    Spectrum s;
    s.kind = SpectrumKind::rtn;
    s.rate = rate;
    s.validate();
    return s;
}

Spectrum Spectrum::one_over_f(double band_lo, double band_hi, double alpha, double quad_rel_tol) {
    Spectrum s;
    s.kind = SpectrumKind::composite;
    s.band_lo = band_lo;
    s.band_hi = band_hi;
    s.alpha = alpha;
    s.quad_rel_tol = quad_rel_tol;
    s.validate();
    return s;
}

Spectrum Spectrum::flat(double level) {
    Spectrum s;
    s.kind = SpectrumKind::flat;
    s.level = level;
    s.validate();
    return s;
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
    if (name == "power_law") return SpectrumKind::power_law;
    if (name == "rtn") return SpectrumKind::rtn;
    if (name == "composite") return SpectrumKind::composite;
    if (name == "flat") return SpectrumKind::flat;
    throw std::invalid_argument("unknown spectrum kind: " + name);
}

std::string to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::power_law: return "power_law";
        case SpectrumKind::rtn: return "rtn";
        case SpectrumKind::composite: return "composite";
        case SpectrumKind::flat: return "flat";
    }
    return "?";
}

}  // namespace lgtsim::noise
