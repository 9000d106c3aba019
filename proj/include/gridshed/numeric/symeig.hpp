#pragma once

#include <Eigen/Core>

namespace gridshed::numeric {

struct SymmetricEigen {
    Eigen::VectorXd values;   // sorted descending
    Eigen::MatrixXd vectors;  // column i pairs with values(i); orthonormal
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Deterministic; converges for any symmetric input. Intended for the small
/// dense problems in this toolkit (feature covariances, graph Laplacians).
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& matrix);

}  // namespace gridshed::numeric
