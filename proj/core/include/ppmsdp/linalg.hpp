#pragma once

#include <Eigen/Dense>

namespace ppm {

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Full decomposition. Only the lower triangle of `m` is read.
SymmetricEigen eigh(const Eigen::MatrixXd& m);

/// Eigenpairs with eigenvalue strictly above `threshold`. With LAPACKE this
/// uses the MRRR driver restricted to a half-open interval, which is much
/// cheaper than a full decomposition when few eigenvalues qualify.
SymmetricEigen eigh_above(const Eigen::MatrixXd& m, double threshold);

/// Nearest positive semidefinite matrix in Frobenius norm.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace ppm
