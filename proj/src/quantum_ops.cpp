#include "sers/quantum_ops.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace sers {

SubsystemSpec SubsystemSpec::boson(std::string label, std::size_t dim) {
    return SubsystemSpec{SubsystemKind::boson, dim, std::move(label)};
}

SubsystemSpec SubsystemSpec::two_level(std::string label) {
    return SubsystemSpec{SubsystemKind::two_level, 2, std::move(label)};
}

CompositeSpace::CompositeSpace(std::vector<SubsystemSpec> subsystems) : subsystems_(std::move(subsystems)) {
    if (subsystems_.empty()) {
        throw DimensionError("CompositeSpace: at least one subsystem required");
    }
    std::unordered_set<std::string> seen;
    for (const auto& s : subsystems_) {
        if (s.dim < 2) {
            throw DimensionError("CompositeSpace: subsystem '" + s.label + "' has dim < 2");
        }
        if (s.kind == SubsystemKind::two_level && s.dim != 2) {
            throw DimensionError("CompositeSpace: two-level subsystem '" + s.label + "' must have dim 2");
        }
        if (!seen.insert(s.label).second) {
            throw DimensionError("CompositeSpace: duplicate label '" + s.label + "'");
        }
    }
    strides_.assign(subsystems_.size(), 1);
    for (std::size_t k = subsystems_.size(); k-- > 0;) {
        strides_[k] = dimension_;
        dimension_ *= subsystems_[k].dim;
    }
}

bool CompositeSpace::contains(const std::string& label) const noexcept {
    return std::any_of(subsystems_.begin(), subsystems_.end(), [&](const auto& s) { return s.label == label; });
}

std::size_t CompositeSpace::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < subsystems_.size(); ++k) {
        if (subsystems_[k].label == label) return k;
    }
    throw DimensionError("CompositeSpace: unknown subsystem label '" + label + "'");
}

std::size_t CompositeSpace::local_index(std::size_t basis_index, std::size_t slot) const {
    return (basis_index / strides_.at(slot)) % subsystems_[slot].dim;
}

CompositeSpace CompositeSpace::extended(const std::vector<SubsystemSpec>& extra) const {
    auto all = subsystems_;
    all.insert(all.end(), extra.begin(), extra.end());
    return CompositeSpace(std::move(all));
}

bool CompositeSpace::operator==(const CompositeSpace& other) const noexcept {
    if (subsystems_.size() != other.subsystems_.size()) return false;
    for (std::size_t k = 0; k < subsystems_.size(); ++k) {
        const auto& a = subsystems_[k];
        const auto& b = other.subsystems_[k];
        if (a.kind != b.kind || a.dim != b.dim || a.label != b.label) return false;
    }
    return true;
}

SpacePtr make_space(std::vector<SubsystemSpec> subsystems) {
    return std::make_shared<const CompositeSpace>(std::move(subsystems));
}

SparseMat pruned(const SparseMat& m, double threshold) {
    SparseMat out = m;
    out.prune([threshold](Eigen::Index, Eigen::Index, const cplx& v) { return std::abs(v) >= threshold; });
    out.makeCompressed();
    return out;
}

SparseMat kron(const SparseMat& a, const SparseMat& b) {
    SparseMat out = Eigen::kroneckerProduct(a, b);
    out.makeCompressed();
    return out;
}

Operator::Operator(SpacePtr space, SparseMat matrix) : space_(std::move(space)), matrix_(pruned(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw DimensionError("Operator: matrix must be square");
    }
    if (space_ && static_cast<std::size_t>(matrix_.rows()) != space_->dimension()) {
        throw DimensionError("Operator: matrix dimension " + std::to_string(matrix_.rows()) +
                             " does not match space dimension " + std::to_string(space_->dimension()));
    }
}

Operator::Operator(SparseMat matrix) : Operator(nullptr, std::move(matrix)) {}

Operator Operator::adjoint() const {
    return Operator(space_, SparseMat(matrix_.adjoint()));
}

double Operator::max_abs_diff(const Operator& other) const {
    if (matrix_.rows() != other.matrix_.rows()) {
        throw DimensionError("max_abs_diff: dimension mismatch");
    }
    SparseMat d = matrix_ - other.matrix_;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

bool Operator::is_hermitian(double tol) const {
    return max_abs_diff(adjoint()) < tol;
}

namespace {

const SpacePtr& common_space(const Operator& lhs, const Operator& rhs) {
    const auto& a = lhs.space();
    const auto& b = rhs.space();
    if (a != b && !(a && b && *a == *b)) {
        throw SpaceMismatchError("operator arithmetic: operands live on different spaces");
    }
    if (lhs.dimension() != rhs.dimension()) {
        throw DimensionError("operator arithmetic: dimension mismatch");
    }
    return a;
}

}  // namespace

Operator operator+(const Operator& lhs, const Operator& rhs) {
    const auto& s = common_space(lhs, rhs);
    return Operator(s, SparseMat(lhs.matrix() + rhs.matrix()));
}

Operator operator-(const Operator& lhs, const Operator& rhs) {
    const auto& s = common_space(lhs, rhs);
    return Operator(s, SparseMat(lhs.matrix() - rhs.matrix()));
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    const auto& s = common_space(lhs, rhs);
    return Operator(s, SparseMat(lhs.matrix() * rhs.matrix()));
}

Operator operator*(cplx scale, const Operator& op) {
    return Operator(op.space(), SparseMat(scale * op.matrix()));
}

Operator operator*(double scale, const Operator& op) {
    return cplx(scale, 0.0) * op;
}

Operator destroy(std::size_t dim) {
    if (dim < 2) {
        throw DimensionError("destroy: truncation dimension must be >= 2, got " + std::to_string(dim));
    }
    const auto n = static_cast<Eigen::Index>(dim);
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(dim - 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        t.emplace_back(k, k + 1, std::sqrt(static_cast<double>(k + 1)));
    }
    SparseMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return Operator(std::move(m));
}

Operator sigma_minus() {
    return destroy(2);
}

Operator identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    SparseMat m(n, n);
    m.setIdentity();
    return Operator(std::move(m));
}

Operator identity(const SpacePtr& space) {
    return Operator(space, identity(space->dimension()).matrix());
}

Operator zero(const SpacePtr& space) {
    const auto n = static_cast<Eigen::Index>(space->dimension());
    return Operator(space, SparseMat(n, n));
}

Operator embed(const SpacePtr& space, const std::string& label, const Operator& local) {
    const std::size_t slot = space->index_of(label);
    const auto& subs = space->subsystems();
    if (local.dimension() != subs[slot].dim) {
        throw DimensionError("embed: local operator has dim " + std::to_string(local.dimension()) +
                             " but subsystem '" + label + "' has dim " + std::to_string(subs[slot].dim));
    }
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t k = 0; k < slot; ++k) before *= subs[k].dim;
    for (std::size_t k = slot + 1; k < subs.size(); ++k) after *= subs[k].dim;

    SparseMat m = local.matrix();
    if (before > 1) m = kron(identity(before).matrix(), m);
    if (after > 1) m = kron(m, identity(after).matrix());
    return Operator(space, std::move(m));
}

DensityMatrix::DensityMatrix(SpacePtr space, DenseMat rho) : space_(std::move(space)), rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) {
        throw DimensionError("DensityMatrix: matrix must be square");
    }
    if (space_ && static_cast<std::size_t>(rho_.rows()) != space_->dimension()) {
        throw DimensionError("DensityMatrix: dimension does not match space");
    }
}

double DensityMatrix::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const DenseMat herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMat> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::basis_projector(SpacePtr space, std::size_t index) {
    const auto n = static_cast<Eigen::Index>(space->dimension());
    if (static_cast<Eigen::Index>(index) >= n) {
        throw DimensionError("basis_projector: index out of range");
    }
    DenseMat rho = DenseMat::Zero(n, n);
    rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return DensityMatrix(std::move(space), std::move(rho));
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
    if (op.dimension() != rho.dimension()) {
        throw SpaceMismatchError("expectation: operator and state dimensions differ");
    }
    if (op.space() && rho.space() && op.space() != rho.space() && !(*op.space() == *rho.space())) {
        throw SpaceMismatchError("expectation: operator and state live on different spaces");
    }
    const auto& m = op.matrix();
    const auto& r = rho.matrix();
    cplx acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(m, k); it; ++it) acc += it.value() * r(it.col(), it.row());
    }
    return acc;
}

}  // namespace sers
