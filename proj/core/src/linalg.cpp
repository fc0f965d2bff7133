#include "ppmsdp/linalg.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

#if defined(PPMSDP_HAVE_LAPACKE)
#include <lapacke.h>
#endif

namespace ppm {

#if defined(PPMSDP_HAVE_LAPACKE)

namespace {

// range: 'A' all eigenpairs, 'V' those in (vl, vu].
SymmetricEigen syevr(const Eigen::MatrixXd& m, char range, double vl, double vu) {
  const auto n = static_cast<lapack_int>(m.rows());
  SymmetricEigen out;
  if (n == 0) return out;
  Eigen::MatrixXd work = m;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, work.data(), n, vl, vu, 0, 0, 0.0,
                     &found, w.data(), z.data(), n, support.data());
  if (info != 0) throw std::runtime_error("dsyevr failed with info " + std::to_string(info));
  out.values = w.head(found);
  out.vectors = z.leftCols(found);
  return out;
}

}  // namespace

SymmetricEigen eigh(const Eigen::MatrixXd& m) { return syevr(m, 'A', 0.0, 0.0); }

SymmetricEigen eigh_above(const Eigen::MatrixXd& m, double threshold) {
  return syevr(m, 'V', threshold, std::numeric_limits<double>::max());
}

#else

SymmetricEigen eigh(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymmetricEigen eigh_above(const Eigen::MatrixXd& m, double threshold) {
  SymmetricEigen all = eigh(m);
  Eigen::Index first = 0;
  while (first < all.values.size() && all.values(first) <= threshold) ++first;
  const Eigen::Index count = all.values.size() - first;
  return {all.values.tail(count), all.vectors.rightCols(count)};
}

#endif

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  const SymmetricEigen pos = eigh_above(m, 0.0);
  const Eigen::MatrixXd scaled = pos.vectors * pos.values.cwiseSqrt().asDiagonal();
  return scaled * scaled.transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  return eigh(m).values(0);
}

}  // namespace ppm
