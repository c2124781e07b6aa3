#pragma once

#include "sers/models.hpp"

#include <random>

namespace testing_support {

// Small truncations keep the solver tests fast.
inline sers::ModelParams small_params() {
    sers::ModelParams p;
    p.trunc_cavity = 5;
    p.trunc_vibron = 3;
    p.trunc_bright = 3;
    return p;
}

inline sers::DenseMat random_density(std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    sers::DenseMat m(dim, dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {n(rng), n(rng)};
    sers::DenseMat rho = m * m.adjoint();
    return rho / rho.trace();
}

}  // namespace testing_support
