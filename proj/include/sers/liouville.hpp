// liouville.hpp - Liouvillian superoperator and steady states.
//
// Vectorization stacks columns: vec(rho)[i + j*D] = rho(i, j), so that
// vec(A rho B) = (B^T (x) A) vec(rho).

#pragma once

#include "sers/models.hpp"

#include <Eigen/UmfPackSupport>

#include <memory>
#include <mutex>
#include <optional>

namespace sers {

struct Liouvillian {
    SpacePtr space;
    SparseMat L;  // D^2 x D^2

    std::size_t hilbert_dim() const noexcept { return space->dimension(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(L.rows()); }
};

Liouvillian assemble(const LindbladModel& model);

Eigen::VectorXcd vectorize(const DenseMat& rho);
DenseMat unvectorize(const Eigen::VectorXcd& x, std::size_t dim);

// Max absolute column sum.
double one_norm(const SparseMat& m);

// The shifted Liouvillian L + s*I with the equation for rho(0,0) replaced by
// the trace functional. For trace-zero right-hand sides (and for the
// steady-state problem with rhs = e_0) this system is non-singular whenever
// the kernel of L is one-dimensional, including s = 0.
//
// The sparsity pattern is analysed once; factorize() only redoes the numeric
// phase. An optional diagonal `scale` solves the similar system
// S^-1 M S y = S^-1 b (x = S y), which keeps tiny but structured entries of
// the solution at full relative precision. scale[0] must be 1.
// Held around every symbolic analysis. The METIS ordering keeps global
// random state, so concurrent orderings can differ and change the rounding
// of everything downstream.
std::mutex& ordering_mutex();

class BorderedSystem {
public:
    explicit BorderedSystem(const Liouvillian& liouvillian, Eigen::VectorXd scale = {});

    void factorize(cplx shift);
    bool factorized() const noexcept { return factorized_; }
    cplx shift() const noexcept { return shift_; }

    // Solves the (unscaled) bordered system M x = rhs. rhs(0) is the trace
    // constraint value.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

    // ||M x - rhs||_inf / max(||rhs||_inf, tiny), evaluated in the scaled
    // coordinates used by the factorization.
    double relative_residual(const Eigen::VectorXcd& x, const Eigen::VectorXcd& rhs) const;

    const Liouvillian& liouvillian() const noexcept { return *liouvillian_; }

private:
    const Liouvillian* liouvillian_;
    Eigen::VectorXd scale_;
    SparseMat base_;
    std::vector<Eigen::Index> diagonal_slots_;
    SparseMat work_;
    Eigen::UmfPackLU<SparseMat> lu_;
    bool factorized_{false};
    cplx shift_{0.0, 0.0};
};

struct SteadyStateOptions {
    double residual_tol{1e-9};
    bool check_uniqueness{true};
    int power_iterations{25};
    // Relative threshold on |lambda_2| / ||L||_1 below which the kernel is
    // treated as degenerate.
    double degeneracy_tol{1e-10};
    Eigen::VectorXd scale{};
};

struct SteadyStateReport {
    double residual{0.0};           // ||L vec(rho)||_inf before normalization clean-up
    double second_eigenvalue{-1.0};  // |lambda_2| estimate, negative if not computed
    double norm_L{0.0};
};

DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options = {},
                           SteadyStateReport* report = nullptr);

// Convenience: assemble + solve.
DensityMatrix steady_state(const LindbladModel& model, const SteadyStateOptions& options = {},
                           SteadyStateReport* report = nullptr);

}  // namespace sers
