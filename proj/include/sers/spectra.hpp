// spectra.hpp - steady-state emission spectrum and two-time correlations.
//
// S(omega) = (1/pi) Re int_0^inf exp(i(omega - omega_L) tau) <da^dag(0) da(tau)> dtau
//
// evaluated by the quantum regression theorem. Only the fluctuation part
// da = a - <a> is rasterized; the coherent (Rayleigh) weight |<a>|^2 sits at
// omega_L as a delta and is reported as a separate scalar.

#pragma once

#include "sers/liouville.hpp"

#include <string>
#include <vector>

namespace sers {

enum class PeakKind { stokes, anti_stokes, rayleigh };
enum class PeakMethod { grid_max, resolvent_point };

std::string to_string(PeakKind kind);
std::string to_string(PeakMethod method);

struct PeakRecord {
    PeakKind kind{PeakKind::anti_stokes};
    double omega_center{0.0};  // lab frame
    double height{0.0};
    PeakMethod method{PeakMethod::resolvent_point};
};

struct Spectrum {
    std::vector<double> omega;   // lab frame, strictly increasing
    std::vector<double> values;  // fluctuation spectral density
    double rayleigh_weight{0.0};  // |<a>|^2
    double cavity_population{0.0};  // <a^dag a>
    std::string model_tag;
    std::string params_hash;
    std::vector<PeakRecord> peaks;
};

// Resolvent evaluator for one model and its steady state. Reuses the symbolic
// factorization of the bordered Liouvillian across frequencies. Not
// thread-safe; give each worker its own instance.
class EmissionSolver {
public:
    EmissionSolver(const LindbladModel& model, const DensityMatrix& rho_ss);

    // S at a lab-frame frequency. Throws SingularShiftError when the shifted
    // system is singular at omega.
    double density(double omega);

    double rayleigh_weight() const noexcept { return rayleigh_weight_; }
    double cavity_population() const noexcept { return cavity_population_; }
    double omega_L() const noexcept { return omega_L_; }
    double omega_v() const noexcept { return omega_v_; }

private:
    Liouvillian liouvillian_;
    BorderedSystem system_;
    Operator a_;
    Eigen::VectorXcd fluctuation_;
    std::size_t dim_;
    double omega_L_;
    double omega_v_;
    double rayleigh_weight_;
    double cavity_population_;
};

// 2001 points over [omega_L - 2 omega_v, omega_L + 2 omega_v] plus a sub-grid
// of step kappa_v/10 within +-5 kappa_v of both Raman lines.
std::vector<double> default_grid(double omega_L, double omega_v, double kappa_v);

// Evenly spaced grid, count >= 1.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

Spectrum emission_spectrum(const LindbladModel& model, const DensityMatrix& rho_ss, const std::vector<double>& grid,
                           int workers = 1);

// Classifies by proximity to omega_L +- omega_v (within 5 kappa_v-ish
// windows), otherwise Rayleigh when nearest to omega_L.
PeakKind classify_frequency(double omega, double omega_L, double omega_v);

PeakRecord peak_value(const LindbladModel& model, const DensityMatrix& rho_ss, double omega_target);

// Grid maxima within +-half_window of omega_L -+ omega_v.
std::vector<PeakRecord> extract_grid_peaks(const Spectrum& spectrum, double omega_L, double omega_v,
                                           double half_window);

// C(tau) = Tr[B e^{L tau}(rho_ss A)] by adaptive Dormand-Prince integration.
std::vector<cplx> two_time_correlation(const LindbladModel& model, const DensityMatrix& rho_ss, const Operator& A,
                                       const Operator& B, const std::vector<double>& tau_grid, double rel_tol = 1e-9);

// Time-domain route to S(omega): integrates the regression equations and the
// one-sided Fourier integrals together up to tau_max.
std::vector<double> emission_spectrum_time_domain(const LindbladModel& model, const DensityMatrix& rho_ss,
                                                  const std::vector<double>& omegas, double tau_max,
                                                  double rel_tol = 1e-9);

// Trapezoidal integral of the rasterized fluctuation spectrum.
double integrate_spectrum(const Spectrum& spectrum);

}  // namespace sers
