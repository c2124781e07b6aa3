// raman_analytics.hpp - closed-form Raman quantities.
//
// Linearized picture around the driven cavity amplitude: off-resonant
// (optomechanical) and near-resonant Raman amplitudes for the Stokes and
// anti-Stokes lines, vibron Lorentzians and the equalization temperature.

#pragma once

#include "sers/models.hpp"
#include "sers/spectra.hpp"

#include <vector>

namespace sers {

struct ElectronicLevel {
    double g0{0.0};     // electron-vibron coupling
    double g{0.0};      // cavity coupling
    double delta{0.0};  // detuning from the laser
};

// N copies of one level.
std::vector<ElectronicLevel> uniform_levels(int count, double g0, double g, double delta);

// sum g0_i g_i^2 / delta_i^2. Throws ParameterError on a zero detuning.
double g_om_from_levels(const std::vector<ElectronicLevel>& levels);

// sum g_i^2 / delta_i, the magnitude of the cavity red shift.
double cavity_redshift(const std::vector<ElectronicLevel>& levels);

// Effective optomechanical parameters from the N identical off-resonant levels
// of `p` (detuning omega_off - omega_L).
struct EliminatedParams {
    double g_om{0.0};
    double redshift{0.0};
    double delta_c_prime{0.0};  // delta_c - redshift
};
EliminatedParams eliminate_off_resonant(const ModelParams& p);

// -Omega / (delta_c_prime - i kappa/2).
cplx driven_amplitude(double Omega, double delta_c_prime, double kappa);

// g_r^2 kappa / ((kappa/2)^2 + (delta_r - delta_c_prime)^2).
double purcell_rate(double g_r, double kappa, double delta_r, double delta_c_prime);

struct RamanCoefficients {
    cplx alpha_s{};
    double Gamma_eff{0.0};
    cplx xi_mean{};
    cplx C_off_S{};
    cplx C_off_aS{};
    cplx C_res_S{};
    cplx C_res_aS{};

    cplx total_S() const { return C_off_S + C_res_S; }
    cplx total_aS() const { return C_off_aS + C_res_aS; }
};

// Coefficients for the combined model. Pass g_om = 0 for the purely resonant
// model, or zero g_r / g0_r in `p` for the purely optomechanical one.
RamanCoefficients raman_coefficients(const ModelParams& p, double g_om, double delta_c_prime);

// Vibron Lorentzians (1+n) and n weighted, gamma_v the vibron linewidth.
double vibron_lorentzian_stokes(double omega, double omega_L, double omega_v, double n_v, double gamma_v);
double vibron_lorentzian_antistokes(double omega, double omega_L, double omega_v, double n_v, double gamma_v);

// |C_S|^2 |C_v,S|^2 + |C_aS|^2 |C_v,aS|^2 on the grid.
Spectrum theoretical_raman_spectrum(const RamanCoefficients& c, double n_v, double gamma_v,
                                    const std::vector<double>& grid, double omega_L, double omega_v);

// Line maximum: |C|^2 * 4(1+n)/gamma_v (Stokes) or |C|^2 * 4n/gamma_v (anti-Stokes).
double theoretical_peak(const RamanCoefficients& c, PeakKind kind, double n_v, double gamma_v);

// h omega_v / (k_B ln(1 + 1/n_f)) in kelvin. Throws ParameterError for n_f <= 0.
double equalization_temperature(double omega_v, double n_f);

}  // namespace sers
