#include "sers/spectra.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace sers {

namespace {

constexpr double singular_residual_tol = 1e-6;

// Tr[op X] with X given column-stacked.
cplx trace_product(const SparseMat& op, const Eigen::VectorXcd& x, Eigen::Index dim) {
    cplx acc{0.0, 0.0};
    for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(op, col); it; ++it) acc += it.value() * x(col + it.row() * dim);
    }
    return acc;
}

std::string format_omega(double omega) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", omega);
    return buf;
}

}  // namespace

std::string to_string(PeakKind kind) {
    switch (kind) {
        case PeakKind::stokes: return "stokes";
        case PeakKind::anti_stokes: return "antistokes";
        case PeakKind::rayleigh: return "rayleigh";
    }
    return "unknown";
}

std::string to_string(PeakMethod method) {
    return method == PeakMethod::grid_max ? "grid-max" : "resolvent-point";
}

EmissionSolver::EmissionSolver(const LindbladModel& model, const DensityMatrix& rho_ss)
    : liouvillian_(assemble(model)),
      system_(liouvillian_),
      a_(model.cavity_annihilator()),
      dim_(model.space->dimension()),
      omega_L_(model.omega_L),
      omega_v_(model.omega_v) {
    if (rho_ss.space() != model.space && !(*rho_ss.space() == *model.space)) {
        throw SpaceMismatchError("EmissionSolver: density matrix lives on a different space");
    }
    const DenseMat& rho = rho_ss.matrix();
    const cplx mean_a = expectation(a_, rho_ss);
    rayleigh_weight_ = std::norm(mean_a);
    cavity_population_ = expectation(a_.adjoint() * a_, rho_ss).real();
    DenseMat y = rho * DenseMat(a_.adjoint().dense());
    y -= std::conj(mean_a) * rho;
    fluctuation_ = vectorize(y);
}

double EmissionSolver::density(double omega) {
    const double nu = omega - omega_L_;
    try {
        system_.factorize(cplx(0.0, nu));
    } catch (const SolverError&) {
        throw SingularShiftError("emission spectrum: shifted Liouvillian is singular at omega = " + format_omega(omega),
                                 omega);
    }
    Eigen::VectorXcd rhs = -fluctuation_;
    rhs(0) = 0.0;
    const Eigen::VectorXcd x = system_.solve(rhs);
    const double res = system_.relative_residual(x, rhs);
    if (!std::isfinite(res) || res > singular_residual_tol) {
        throw SingularShiftError("emission spectrum: shifted solve lost accuracy at omega = " + format_omega(omega) +
                                     " (relative residual " + std::to_string(res) + ")",
                                 omega);
    }
    return trace_product(a_.matrix(), x, static_cast<Eigen::Index>(dim_)).real() / std::numbers::pi;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count == 0) throw ParameterError("linear_grid: count must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ParameterError("linear_grid: bounds must be finite");
    if (count == 1) return {lo};
    if (!(hi > lo)) throw ParameterError("linear_grid: max must exceed min");
    std::vector<double> g(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) g[k] = lo + step * static_cast<double>(k);
    g.back() = hi;
    return g;
}

std::vector<double> default_grid(double omega_L, double omega_v, double kappa_v) {
    if (!(omega_v > 0.0) || !(kappa_v > 0.0)) throw ParameterError("default_grid: omega_v and kappa_v must be positive");
    std::vector<double> g = linear_grid(omega_L - 2.0 * omega_v, omega_L + 2.0 * omega_v, 2001);
    for (double center : {omega_L - omega_v, omega_L + omega_v}) {
        const auto sub = linear_grid(center - 5.0 * kappa_v, center + 5.0 * kappa_v, 101);
        g.insert(g.end(), sub.begin(), sub.end());
    }
    std::sort(g.begin(), g.end());
    const double tol = 1e-9 * std::max(1.0, std::abs(omega_L));
    g.erase(std::unique(g.begin(), g.end(), [tol](double x, double y) { return std::abs(x - y) <= tol; }), g.end());
    return g;
}

PeakKind classify_frequency(double omega, double omega_L, double omega_v) {
    const double ds = std::abs(omega - (omega_L - omega_v));
    const double das = std::abs(omega - (omega_L + omega_v));
    const double dr = std::abs(omega - omega_L);
    if (dr <= ds && dr <= das) return PeakKind::rayleigh;
    return ds < das ? PeakKind::stokes : PeakKind::anti_stokes;
}

std::vector<PeakRecord> extract_grid_peaks(const Spectrum& spectrum, double omega_L, double omega_v,
                                           double half_window) {
    std::vector<PeakRecord> out;
    for (auto [kind, center] : {std::pair{PeakKind::stokes, omega_L - omega_v},
                                std::pair{PeakKind::anti_stokes, omega_L + omega_v}}) {
        std::size_t best = spectrum.omega.size();
        for (std::size_t k = 0; k < spectrum.omega.size(); ++k) {
            if (std::abs(spectrum.omega[k] - center) > half_window) continue;
            if (best == spectrum.omega.size() || spectrum.values[k] > spectrum.values[best]) best = k;
        }
        if (best == spectrum.omega.size()) continue;
        out.push_back({kind, spectrum.omega[best], spectrum.values[best], PeakMethod::grid_max});
    }
    return out;
}

Spectrum emission_spectrum(const LindbladModel& model, const DensityMatrix& rho_ss, const std::vector<double>& grid,
                           int workers) {
    if (grid.empty()) throw ParameterError("emission_spectrum: empty grid");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw ParameterError("emission_spectrum: grid must be strictly increasing");
    }
    Spectrum s;
    s.omega = grid;
    s.values.assign(grid.size(), 0.0);
    s.model_tag = to_string(model.kind);

    EmissionSolver head(model, rho_ss);
    s.rayleigh_weight = head.rayleigh_weight();
    s.cavity_population = head.cavity_population();

    const auto n_workers = static_cast<std::size_t>(std::clamp<int>(workers, 1, static_cast<int>(grid.size())));
    if (n_workers == 1) {
        for (std::size_t k = 0; k < grid.size(); ++k) s.values[k] = head.density(grid[k]);
    } else {
        std::vector<std::exception_ptr> errors(n_workers);
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    EmissionSolver local(model, rho_ss);
                    for (std::size_t k = w; k < grid.size(); k += n_workers) s.values[k] = local.density(grid[k]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    const double window = std::min(0.5, 0.25 * model.omega_v);
    s.peaks = extract_grid_peaks(s, model.omega_L, model.omega_v, window);
    for (auto [kind, center] : {std::pair{PeakKind::stokes, model.omega_L - model.omega_v},
                                std::pair{PeakKind::anti_stokes, model.omega_L + model.omega_v}}) {
        s.peaks.push_back({kind, center, head.density(center), PeakMethod::resolvent_point});
    }
    return s;
}

PeakRecord peak_value(const LindbladModel& model, const DensityMatrix& rho_ss, double omega_target) {
    EmissionSolver solver(model, rho_ss);
    return {classify_frequency(omega_target, model.omega_L, model.omega_v), omega_target, solver.density(omega_target),
            PeakMethod::resolvent_point};
}

double integrate_spectrum(const Spectrum& spectrum) {
    double acc = 0.0;
    for (std::size_t k = 1; k < spectrum.omega.size(); ++k) {
        acc += 0.5 * (spectrum.values[k] + spectrum.values[k - 1]) * (spectrum.omega[k] - spectrum.omega[k - 1]);
    }
    return acc;
}

namespace {

// Real-split state for odeint: [Re x, Im x] blocks of length n each.
using RealState = std::vector<double>;

void pack(const Eigen::VectorXcd& x, RealState& s, std::size_t offset) {
    const auto n = static_cast<std::size_t>(x.size());
    for (std::size_t k = 0; k < n; ++k) {
        s[offset + k] = x(static_cast<Eigen::Index>(k)).real();
        s[offset + n + k] = x(static_cast<Eigen::Index>(k)).imag();
    }
}

Eigen::VectorXcd unpack(const RealState& s, std::size_t offset, std::size_t n) {
    Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) x(static_cast<Eigen::Index>(k)) = cplx(s[offset + k], s[offset + n + k]);
    return x;
}

bool all_finite(const RealState& s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

std::vector<cplx> two_time_correlation(const LindbladModel& model, const DensityMatrix& rho_ss, const Operator& A,
                                       const Operator& B, const std::vector<double>& tau_grid, double rel_tol) {
    namespace ode = boost::numeric::odeint;
    if (A.dimension() != model.space->dimension() || B.dimension() != model.space->dimension()) {
        throw SpaceMismatchError("two_time_correlation: operator dimension does not match the model");
    }
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        if (!(tau_grid[k] >= 0.0) || (k > 0 && !(tau_grid[k] >= tau_grid[k - 1]))) {
            throw ParameterError("two_time_correlation: tau grid must be non-negative and non-decreasing");
        }
    }
    if (tau_grid.empty()) return {};

    const Liouvillian liou = assemble(model);
    const auto n = liou.size();
    const auto dim = static_cast<Eigen::Index>(model.space->dimension());
    const Eigen::VectorXcd x0 = vectorize(rho_ss.matrix() * A.dense());
    const SparseMat& b = B.matrix();

    RealState state(2 * n);
    pack(x0, state, 0);
    auto rhs = [&](const RealState& s, RealState& ds, double) {
        const Eigen::VectorXcd dx = liou.L * unpack(s, 0, n);
        pack(dx, ds, 0);
    };

    std::vector<cplx> out;
    out.reserve(tau_grid.size());
    auto observer = [&](const RealState& s, double) { out.push_back(trace_product(b, unpack(s, 0, n), dim)); };

    const double abs_tol = rel_tol * std::max(1e-300, x0.cwiseAbs().maxCoeff());
    try {
        auto stepper = ode::make_dense_output(abs_tol, rel_tol, ode::runge_kutta_dopri5<RealState>());
        std::vector<double> times = tau_grid;
        if (times.size() == 1) {
            out.push_back(trace_product(b, x0, dim));
        } else {
            const double dt0 = std::max(1e-6, (times.back() - times.front()) * 1e-4);
            ode::integrate_times(stepper, rhs, state, times.begin(), times.end(), dt0, observer);
        }
    } catch (const std::exception& e) {
        throw IntegratorError(std::string("two_time_correlation: integrator failed: ") + e.what());
    }
    if (!all_finite(state) || out.size() != tau_grid.size()) {
        throw IntegratorError("two_time_correlation: integration produced non-finite values");
    }
    return out;
}

std::vector<double> emission_spectrum_time_domain(const LindbladModel& model, const DensityMatrix& rho_ss,
                                                  const std::vector<double>& omegas, double tau_max, double rel_tol) {
    namespace ode = boost::numeric::odeint;
    if (!(tau_max > 0.0)) throw ParameterError("emission_spectrum_time_domain: tau_max must be positive");

    const Liouvillian liou = assemble(model);
    const auto n = liou.size();
    const auto dim = static_cast<Eigen::Index>(model.space->dimension());
    const Operator a = model.cavity_annihilator();
    const cplx mean_a = expectation(a, rho_ss);
    DenseMat y = rho_ss.matrix() * DenseMat(a.adjoint().dense());
    y -= std::conj(mean_a) * rho_ss.matrix();
    const Eigen::VectorXcd x0 = vectorize(y);
    const SparseMat& am = a.matrix();
    const std::size_t m = omegas.size();

    // State: x (n complex) followed by the Fourier integrals J_k (m complex).
    RealState state(2 * (n + m), 0.0);
    pack(x0, state, 0);
    auto rhs = [&](const RealState& s, RealState& ds, double tau) {
        const Eigen::VectorXcd x = unpack(s, 0, n);
        pack(liou.L * x, ds, 0);
        const cplx c = trace_product(am, x, dim);
        for (std::size_t k = 0; k < m; ++k) {
            const cplx f = std::exp(cplx(0.0, (omegas[k] - model.omega_L) * tau)) * c;
            ds[2 * n + k] = f.real();
            ds[2 * n + m + k] = f.imag();
        }
    };

    const double abs_tol = rel_tol * std::max(1e-300, x0.cwiseAbs().maxCoeff());
    try {
        auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_dopri5<RealState>());
        ode::integrate_adaptive(stepper, rhs, state, 0.0, tau_max, 1e-3);
    } catch (const std::exception& e) {
        throw IntegratorError(std::string("emission_spectrum_time_domain: integrator failed: ") + e.what());
    }
    if (!all_finite(state)) throw IntegratorError("emission_spectrum_time_domain: non-finite state");

    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = state[2 * n + k] / std::numbers::pi;
    return out;
}

}  // namespace sers
