// noise.hpp — environment noise power spectra: the power-law family
// S(omega) = gamma / |omega|^beta, the single-fluctuator Lorentzian, and the
// switching-rate-integrated approximation to 1/f^alpha

#pragma once

#include <string>

namespace lgtsim::noise {

enum class SpectrumKind { power_law, rtn, composite, flat };

struct Spectrum {
    SpectrumKind kind = SpectrumKind::power_law;

    // power_law: gamma / max(|omega|, omega_cutoff)^beta
    double gamma = 0.0;
    double beta = 1.0;
    double omega_cutoff = 1e-2;

    // rtn: (1/pi) r / (omega^2 + r^2)
    double rate = 1.0;

    // composite: integral of the Lorentzian over switching rates in
    // [band_lo, band_hi] against p_alpha(r) proportional to 1/r^alpha
    double band_lo = 1e-2;
    double band_hi = 1e2;
    double alpha = 1.0;
    double quad_rel_tol = 1e-8;

    // flat: constant level at every frequency
    double level = 0.0;

    double operator()(double omega) const;
    void validate() const;

    static Spectrum power_law(double gamma, double beta, double omega_cutoff = 1e-2);
    static Spectrum lorentzian(double rate);
    static Spectrum one_over_f(double band_lo, double band_hi, double alpha,
                               double quad_rel_tol = 1e-8);
    static Spectrum flat(double level);
};

double eval_power_law(const Spectrum& s, double omega);
double eval_rtn(const Spectrum& s, double omega);
double eval_composite(const Spectrum& s, double omega);

SpectrumKind spectrum_kind_from_string(const std::string& name);
std::string to_string(SpectrumKind kind);

}  // namespace lgtsim::noise
