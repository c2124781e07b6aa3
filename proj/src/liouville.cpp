#include "sers/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sers {

std::mutex& ordering_mutex() {
    static std::mutex m;
    return m;
}

Liouvillian assemble(const LindbladModel& model) {
    const std::size_t dim = model.space->dimension();
    const SparseMat id = identity(dim).matrix();
    const SparseMat& h = model.H.matrix();
    const SparseMat h_t = h.transpose();

    const cplx minus_i{0.0, -1.0};
    SparseMat L = minus_i * (kron(id, h) - kron(h_t, id));
    for (const auto& c : model.collapses) {
        if (c.rate == 0.0) continue;
        const SparseMat& o = c.op.matrix();
        const SparseMat o_conj = o.conjugate();
        const SparseMat odo = SparseMat(o.adjoint()) * o;
        const SparseMat odo_t = odo.transpose();
        L += (0.5 * c.rate) * (2.0 * kron(o_conj, o) - kron(id, odo) - kron(odo_t, id));
    }
    return Liouvillian{model.space, pruned(L)};
}

Eigen::VectorXcd vectorize(const DenseMat& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DenseMat unvectorize(const Eigen::VectorXcd& x, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    if (x.size() != d * d) throw DimensionError("unvectorize: size mismatch");
    return Eigen::Map<const DenseMat>(x.data(), d, d);
}

double one_norm(const SparseMat& m) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMat::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

BorderedSystem::BorderedSystem(const Liouvillian& liouvillian, Eigen::VectorXd scale)
    : liouvillian_(&liouvillian), scale_(std::move(scale)) {
    const auto n = static_cast<Eigen::Index>(liouvillian.size());
    const auto d = static_cast<Eigen::Index>(liouvillian.hilbert_dim());
    if (scale_.size() == 0) scale_ = Eigen::VectorXd::Ones(n);
    if (scale_.size() != n) throw DimensionError("BorderedSystem: scale has wrong length");
    if (scale_(0) != 1.0) throw DimensionError("BorderedSystem: scale[0] must be 1");

    const SparseMat& L = liouvillian.L;
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(L.nonZeros() + 2 * n));
    for (Eigen::Index col = 0; col < L.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(L, col); it; ++it) {
            if (it.row() == 0) continue;
            t.emplace_back(it.row(), col, it.value() * (scale_(col) / scale_(it.row())));
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index q = i + i * d;
        t.emplace_back(0, q, scale_(q));
    }
    // Structural diagonal so every shift shares one pattern.
    for (Eigen::Index q = 1; q < n; ++q) t.emplace_back(q, q, cplx(0.0, 0.0));

    base_.resize(n, n);
    base_.setFromTriplets(t.begin(), t.end());
    base_.makeCompressed();

    diagonal_slots_.assign(static_cast<std::size_t>(n), -1);
    const auto* outer = base_.outerIndexPtr();
    const auto* inner = base_.innerIndexPtr();
    for (Eigen::Index q = 1; q < n; ++q) {
        for (auto k = outer[q]; k < outer[q + 1]; ++k) {
            if (inner[k] == q) {
                diagonal_slots_[static_cast<std::size_t>(q)] = k;
                break;
            }
        }
    }
    work_ = base_;
    // Nested-dissection ordering gives far less fill than AMD on Kronecker
    // structured superoperators.
    lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
    std::lock_guard<std::mutex> lock(ordering_mutex());
    lu_.analyzePattern(work_);
}

void BorderedSystem::factorize(cplx shift) {
    std::copy(base_.valuePtr(), base_.valuePtr() + base_.nonZeros(), work_.valuePtr());
    if (shift != cplx(0.0, 0.0)) {
        for (std::size_t q = 1; q < diagonal_slots_.size(); ++q) work_.valuePtr()[diagonal_slots_[q]] += shift;
    }
    lu_.factorize(work_);
    factorized_ = lu_.info() == Eigen::Success;
    shift_ = shift;
    if (!factorized_) {
        throw SolverError("bordered Liouvillian factorization failed (shift " + std::to_string(shift.real()) +
                          (shift.imag() >= 0 ? "+" : "") + std::to_string(shift.imag()) + "i)");
    }
}

Eigen::VectorXcd BorderedSystem::solve(const Eigen::VectorXcd& rhs) const {
    if (!factorized_) throw SolverError("BorderedSystem::solve called before a successful factorize()");
    const Eigen::VectorXcd scaled = rhs.cwiseQuotient(scale_.cast<cplx>());
    Eigen::VectorXcd y = lu_.solve(scaled);
    return y.cwiseProduct(scale_.cast<cplx>());
}

double BorderedSystem::relative_residual(const Eigen::VectorXcd& x, const Eigen::VectorXcd& rhs) const {
    const Eigen::VectorXcd s = scale_.cast<cplx>();
    const Eigen::VectorXcd y = x.cwiseQuotient(s);
    const Eigen::VectorXcd b = rhs.cwiseQuotient(s);
    const double denom = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    return (work_ * y - b).cwiseAbs().maxCoeff() / denom;
}

namespace {

// Trace-zero deterministic start vector for inverse iteration.
Eigen::VectorXcd trace_zero_seed(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim * dim);
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::VectorXcd x(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k) = cplx(std::sin(1.0 + 0.7 * static_cast<double>(k)), std::cos(0.3 + 1.3 * static_cast<double>(k)));
    }
    cplx tr{0.0, 0.0};
    for (Eigen::Index i = 0; i < d; ++i) tr += x(i + i * d);
    for (Eigen::Index i = 0; i < d; ++i) x(i + i * d) -= tr / static_cast<double>(dim);
    return x;
}

// |lambda| of the smallest-modulus eigenvalue of L on the trace-zero
// subspace, by inverse iteration through an already factorized system whose
// shift is `shift`.
double smallest_trace_zero_eigenvalue(const BorderedSystem& sys, std::size_t dim, int iterations) {
    Eigen::VectorXcd x = trace_zero_seed(dim);
    x /= x.norm();
    double growth = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd rhs = x;
        rhs(0) = 0.0;
        Eigen::VectorXcd next = sys.solve(rhs);
        growth = next.norm();
        if (!(growth > 0.0) || !std::isfinite(growth)) return 0.0;
        x = next / growth;
    }
    return std::abs(1.0 / growth - sys.shift());
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options,
                           SteadyStateReport* report) {
    const std::size_t dim = liouvillian.hilbert_dim();
    const double norm_L = one_norm(liouvillian.L);
    BorderedSystem sys(liouvillian, options.scale);
    try {
        sys.factorize(0.0);
    } catch (const SolverError&) {
        // Estimate the offending eigenvalue through a slightly shifted system.
        double lambda2 = -1.0;
        try {
            const double sigma = 1e-6 * std::max(norm_L, 1.0);
            sys.factorize(sigma);
            lambda2 = smallest_trace_zero_eigenvalue(sys, dim, options.power_iterations);
        } catch (const SolverError&) {
        }
        throw SolverError("steady_state: singular factorization, Liouvillian kernel is not one-dimensional "
                          "(|lambda_2| estimate " + std::to_string(lambda2) + ")",
                          lambda2);
    }

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(liouvillian.size()));
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = sys.solve(rhs);
    const double residual = (liouvillian.L * x).cwiseAbs().maxCoeff();

    SteadyStateReport rep;
    rep.residual = residual;
    rep.norm_L = norm_L;
    if (!std::isfinite(residual) || residual > options.residual_tol) {
        throw SolverError("steady_state: residual " + std::to_string(residual) + " exceeds tolerance");
    }
    if (options.check_uniqueness) {
        rep.second_eigenvalue = smallest_trace_zero_eigenvalue(sys, dim, options.power_iterations);
        if (rep.second_eigenvalue < options.degeneracy_tol * norm_L) {
            throw SolverError("steady_state: Liouvillian kernel is not one-dimensional (|lambda_2| estimate " +
                                  std::to_string(rep.second_eigenvalue) + ")",
                              rep.second_eigenvalue);
        }
    }
    if (report) *report = rep;

    DenseMat rho = unvectorize(x, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    return DensityMatrix(liouvillian.space, std::move(rho));
}

DensityMatrix steady_state(const LindbladModel& model, const SteadyStateOptions& options, SteadyStateReport* report) {
    return steady_state(assemble(model), options, report);
}

}  // namespace sers
