// quantum_ops.hpp - truncated composite Hilbert spaces and sparse operators on them.
//
// Basis convention: subsystem order is the declaration order of the
// CompositeSpace and the global basis index is row-major mixed radix, i.e. the
// last declared subsystem varies fastest. Basis index 0 is the ground state of
// every subsystem.

#pragma once

#include "sers/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace sers {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx>;
using DenseMat = Eigen::MatrixXcd;

enum class SubsystemKind { boson, two_level };

struct SubsystemSpec {
    SubsystemKind kind{SubsystemKind::boson};
    std::size_t dim{2};
    std::string label;

    static SubsystemSpec boson(std::string label, std::size_t dim);
    static SubsystemSpec two_level(std::string label);
};

class CompositeSpace {
public:
    explicit CompositeSpace(std::vector<SubsystemSpec> subsystems);

    const std::vector<SubsystemSpec>& subsystems() const noexcept { return subsystems_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return subsystems_.size(); }

    bool contains(const std::string& label) const noexcept;
    // Position of `label` in declaration order; throws DimensionError if absent.
    std::size_t index_of(const std::string& label) const;
    const SubsystemSpec& at(const std::string& label) const { return subsystems_[index_of(label)]; }

    // Local occupation of subsystem `slot` in global basis state `basis_index`.
    std::size_t local_index(std::size_t basis_index, std::size_t slot) const;

    // New space with `extra` appended after the existing subsystems.
    CompositeSpace extended(const std::vector<SubsystemSpec>& extra) const;

    bool operator==(const CompositeSpace& other) const noexcept;

private:
    std::vector<SubsystemSpec> subsystems_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_{1};
};

using SpacePtr = std::shared_ptr<const CompositeSpace>;

SpacePtr make_space(std::vector<SubsystemSpec> subsystems);

// Immutable after construction. `space` may be null for single-subsystem
// (local) operators that have not been embedded yet.
class Operator {
public:
    Operator() = default;
    Operator(SpacePtr space, SparseMat matrix);
    // Local operator, not bound to a composite space.
    explicit Operator(SparseMat matrix);

    const SpacePtr& space() const noexcept { return space_; }
    const SparseMat& matrix() const noexcept { return matrix_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    Operator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    // Largest entrywise modulus of (this - other).
    double max_abs_diff(const Operator& other) const;
    DenseMat dense() const { return DenseMat(matrix_); }

private:
    SpacePtr space_;
    SparseMat matrix_;
};

Operator operator+(const Operator& lhs, const Operator& rhs);
Operator operator-(const Operator& lhs, const Operator& rhs);
Operator operator*(const Operator& lhs, const Operator& rhs);
Operator operator*(cplx scale, const Operator& op);
Operator operator*(double scale, const Operator& op);

// Annihilation operator truncated to `dim` levels.
Operator destroy(std::size_t dim);
// |g><e| with the ground state at basis index 0.
Operator sigma_minus();
Operator identity(std::size_t dim);
Operator identity(const SpacePtr& space);
Operator zero(const SpacePtr& space);

// I (x) ... (x) local (x) ... (x) I in the space's declaration order.
Operator embed(const SpacePtr& space, const std::string& label, const Operator& local);

// Drops stored entries with modulus below `threshold`.
SparseMat pruned(const SparseMat& m, double threshold = 1e-16);

// Sparse Kronecker product A (x) B.
SparseMat kron(const SparseMat& a, const SparseMat& b);

class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(SpacePtr space, DenseMat rho);

    const SpacePtr& space() const noexcept { return space_; }
    const DenseMat& matrix() const noexcept { return rho_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rho_.rows()); }

    cplx trace() const { return rho_.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;

    // |n><n| for a product basis state given by its global index.
    static DensityMatrix basis_projector(SpacePtr space, std::size_t index);

private:
    SpacePtr space_;
    DenseMat rho_;
};

// Tr[O rho].
cplx expectation(const Operator& op, const DensityMatrix& rho);

}  // namespace sers
