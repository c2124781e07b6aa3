#include "sers/raman_analytics.hpp"

#include <cmath>

namespace sers {

namespace {

constexpr double planck_h = 6.62607015e-34;
constexpr double boltzmann_k = 1.380649e-23;
constexpr double thz = 1e12;
const cplx I{0.0, 1.0};

void require_detuned(const ElectronicLevel& l) {
    if (l.delta == 0.0) {
        throw ParameterError("resonant level (zero detuning): adiabatic elimination does not apply");
    }
}

}  // namespace

std::vector<ElectronicLevel> uniform_levels(int count, double g0, double g, double delta) {
    if (count < 0) throw ParameterError("uniform_levels: negative level count");
    return std::vector<ElectronicLevel>(static_cast<std::size_t>(count), ElectronicLevel{g0, g, delta});
}

double g_om_from_levels(const std::vector<ElectronicLevel>& levels) {
    double acc = 0.0;
    for (const auto& l : levels) {
        require_detuned(l);
        acc += l.g0 * l.g * l.g / (l.delta * l.delta);
    }
    return acc;
}

double cavity_redshift(const std::vector<ElectronicLevel>& levels) {
    double acc = 0.0;
    for (const auto& l : levels) {
        require_detuned(l);
        acc += l.g * l.g / l.delta;
    }
    return acc;
}

EliminatedParams eliminate_off_resonant(const ModelParams& p) {
    p.validate();
    // Identical levels: the sums collapse to N times one term.
    const std::vector<ElectronicLevel> one{{p.g0, p.g, p.delta_b()}};
    const double n = static_cast<double>(p.N);
    EliminatedParams e;
    e.g_om = n * g_om_from_levels(one);
    e.redshift = n * cavity_redshift(one);
    e.delta_c_prime = p.delta_c() - e.redshift;
    return e;
}

cplx driven_amplitude(double Omega, double delta_c_prime, double kappa) {
    if (delta_c_prime == 0.0 && kappa == 0.0) {
        throw ParameterError("driven_amplitude: undamped resonant cavity (pole)");
    }
    return -Omega / cplx(delta_c_prime, -0.5 * kappa);
}

double purcell_rate(double g_r, double kappa, double delta_r, double delta_c_prime) {
    if (!(kappa > 0.0)) throw ParameterError("purcell_rate: kappa must be positive");
    const double d = delta_r - delta_c_prime;
    return g_r * g_r * kappa / (0.25 * kappa * kappa + d * d);
}

RamanCoefficients raman_coefficients(const ModelParams& p, double g_om, double delta_c_prime) {
    if (!(p.kappa > 0.0)) throw ParameterError("raman_coefficients: kappa must be positive");
    RamanCoefficients c;
    const double dr = p.delta_r();
    const double wv = p.omega_v;
    const double half_k = 0.5 * p.kappa;
    c.alpha_s = driven_amplitude(p.Omega, delta_c_prime, p.kappa);
    c.Gamma_eff = purcell_rate(p.g_r, p.kappa, dr, delta_c_prime);
    const double half_G = 0.5 * c.Gamma_eff;
    const cplx xi_den = I * dr + half_G;
    c.xi_mean = (p.g_r == 0.0 || p.Omega == 0.0) ? cplx{} : -I * p.g_r * c.alpha_s / xi_den;

    // Upper sign (+omega_v) is the Stokes line, lower sign the anti-Stokes line.
    auto off = [&](double s) { return -I * g_om * c.alpha_s / (I * (delta_c_prime + s * wv) + half_k); };
    auto res = [&](double s) {
        return -p.g_r * p.g0_r * c.xi_mean / ((I * (dr + s * wv) + half_G) * (I * (delta_c_prime + s * wv) + half_k));
    };
    c.C_off_S = off(+1.0);
    c.C_off_aS = off(-1.0);
    const bool resonant = p.g_r != 0.0 && p.g0_r != 0.0 && c.xi_mean != cplx{};
    c.C_res_S = resonant ? res(+1.0) : cplx{};
    c.C_res_aS = resonant ? res(-1.0) : cplx{};
    return c;
}

double vibron_lorentzian_stokes(double omega, double omega_L, double omega_v, double n_v, double gamma_v) {
    const double d = omega_L - omega_v - omega;
    return gamma_v * (1.0 + n_v) / (d * d + 0.25 * gamma_v * gamma_v);
}

double vibron_lorentzian_antistokes(double omega, double omega_L, double omega_v, double n_v, double gamma_v) {
    const double d = omega_L + omega_v - omega;
    return gamma_v * n_v / (d * d + 0.25 * gamma_v * gamma_v);
}

Spectrum theoretical_raman_spectrum(const RamanCoefficients& c, double n_v, double gamma_v,
                                    const std::vector<double>& grid, double omega_L, double omega_v) {
    if (!(n_v >= 0.0)) throw ParameterError("theoretical_raman_spectrum: n_v must be non-negative");
    if (!(gamma_v > 0.0)) throw ParameterError("theoretical_raman_spectrum: gamma_v must be positive");
    Spectrum s;
    s.omega = grid;
    s.values.resize(grid.size());
    s.model_tag = "analytic";
    const double ws = std::norm(c.total_S());
    const double was = std::norm(c.total_aS());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s.values[k] = ws * vibron_lorentzian_stokes(grid[k], omega_L, omega_v, n_v, gamma_v) +
                      was * vibron_lorentzian_antistokes(grid[k], omega_L, omega_v, n_v, gamma_v);
    }
    return s;
}

double theoretical_peak(const RamanCoefficients& c, PeakKind kind, double n_v, double gamma_v) {
    if (!(gamma_v > 0.0)) throw ParameterError("theoretical_peak: gamma_v must be positive");
    switch (kind) {
        case PeakKind::stokes: return std::norm(c.total_S()) * 4.0 * (1.0 + n_v) / gamma_v;
        case PeakKind::anti_stokes: return std::norm(c.total_aS()) * 4.0 * n_v / gamma_v;
        case PeakKind::rayleigh: break;
    }
    throw ParameterError("theoretical_peak: only Stokes and anti-Stokes lines have a Raman peak");
}

double equalization_temperature(double omega_v, double n_f) {
    if (!(n_f > 0.0) || !std::isfinite(n_f)) throw ParameterError("equalization_temperature: n_f must be positive");
    return planck_h * omega_v * thz / (boltzmann_k * std::log1p(1.0 / n_f));
}

}  // namespace sers
