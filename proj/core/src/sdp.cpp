#include "ppmsdp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ppmsdp/error.hpp"
#include "ppmsdp/linalg.hpp"

namespace ppm {

Eigen::MatrixXd centered_partition_matrix(const PartitionLabels& labels) {
  const int n = labels.num_vertices();
  const int r = labels.num_communities();
  if (r < 2) throw ParameterError("centered partition matrix: need r >= 2");
  const double off = -1.0 / (r - 1);
  Eigen::MatrixXd x(n, n);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) x(u, v) = labels[u] == labels[v] ? 1.0 : off;
  }
  return x;
}

double centered_sum_target(std::span<const int> sizes) {
  const auto r = static_cast<double>(sizes.size());
  double n = 0.0;
  double sq = 0.0;
  for (int s : sizes) {
    n += s;
    sq += static_cast<double>(s) * s;
  }
  return (r * sq - n * n) / (r - 1.0);
}

SdpProblem build_known_sizes(const Graph& g, std::span<const int> sizes) {
  const int n = g.num_vertices();
  if (sizes.size() < 2) throw ParameterError("known sizes: need at least two communities");
  long total = 0;
  for (int s : sizes) {
    if (s < 1) throw ParameterError("known sizes: community sizes must be positive");
    total += s;
  }
  if (total != n) {
    throw ParameterError("known sizes: sizes sum to " + std::to_string(total) +
                         " but the graph has " + std::to_string(n) + " vertices");
  }
  SdpProblem prob;
  prob.mode = SdpProblem::Mode::kKnownSizes;
  prob.n = n;
  prob.r = static_cast<int>(sizes.size());
  prob.objective = g.adjacency();
  prob.entry_lower_bound = -1.0 / (prob.r - 1);
  prob.sum_target = centered_sum_target(sizes);
  return prob;
}

SdpProblem build_unknown_sizes(const Graph& g, int r, double omega) {
  if (r < 2) throw ParameterError("unknown sizes: need r >= 2");
  if (!(omega >= 0.0 && omega < 1.0)) throw ParameterError("unknown sizes: omega must lie in [0, 1)");
  if (g.num_vertices() < r) throw ParameterError("unknown sizes: fewer vertices than communities");
  SdpProblem prob;
  prob.mode = SdpProblem::Mode::kUnknownSizes;
  prob.n = g.num_vertices();
  prob.r = r;
  prob.objective = g.adjacency().array() - omega;
  prob.entry_lower_bound = -1.0 / (r - 1);
  prob.omega = omega;
  return prob;
}

double objective_value(const Graph& g, const Eigen::MatrixXd& x, std::optional<double> omega) {
  const int n = g.num_vertices();
  if (x.rows() != n || x.cols() != n) throw ParameterError("objective: dimension mismatch");
  double s = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v : g.neighbors(u)) s += x(u, v);
  }
  if (omega) s -= *omega * x.sum();
  return s;
}

namespace {

// Projection onto {diag = 1, off-diagonal >= lb, optional sum of strict upper
// triangle = upper_sum}. Writes into z.
class PolyProjector {
 public:
  PolyProjector(int n, double lb, std::optional<double> upper_sum)
      : n_(n), lb_(lb), upper_sum_(upper_sum) {
    if (upper_sum_) buf_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  }

  void operator()(const Eigen::MatrixXd& y, Eigen::MatrixXd& z) {
    z.resize(n_, n_);
    const double shift = upper_sum_ ? threshold(y) : 0.0;
    for (int v = 0; v < n_; ++v) {
      z(v, v) = 1.0;
      for (int u = v + 1; u < n_; ++u) {
        const double w = std::max(lb_, 0.5 * (y(u, v) + y(v, u)) - shift);
        z(u, v) = w;
        z(v, u) = w;
      }
    }
  }

 private:
  // theta with sum_e max(lb, y_e - theta) = upper_sum over upper-triangle e.
  double threshold(const Eigen::MatrixXd& y) {
    std::size_t k = 0;
    for (int v = 0; v < n_; ++v) {
      for (int u = v + 1; u < n_; ++u) buf_[k++] = 0.5 * (y(u, v) + y(v, u)) - lb_;
    }
    const double mass = *upper_sum_ - lb_ * static_cast<double>(buf_.size());
    if (buf_.empty()) return 0.0;
    if (mass <= 0.0) return *std::max_element(buf_.begin(), buf_.end());
    std::sort(buf_.begin(), buf_.end(), std::greater<>());
    double prefix = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < buf_.size(); ++i) {
      prefix += buf_[i];
      const double t = (prefix - mass) / static_cast<double>(i + 1);
      if (i + 1 == buf_.size() || buf_[i + 1] <= t) {
        theta = t;
        break;
      }
    }
    return theta;
  }

  int n_;
  double lb_;
  std::optional<double> upper_sum_;
  std::vector<double> buf_;
};

Eigen::MatrixXd psd_part(const Eigen::MatrixXd& m) {
  const SymmetricEigen pos = eigh_above(m, 0.0);
  if (pos.values.size() == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const Eigen::MatrixXd scaled = pos.vectors * pos.values.cwiseSqrt().asDiagonal();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  out.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  const int n = problem.n;
  if (problem.objective.rows() != n || problem.objective.cols() != n) {
    throw ParameterError("solve: objective must be n x n");
  }
  if (problem.r < 2) throw ParameterError("solve: need r >= 2");
  if ((problem.mode == SdpProblem::Mode::kKnownSizes) != problem.sum_target.has_value()) {
    throw ParameterError("solve: sum target must be present exactly for known sizes");
  }
  if (!(options.tol > 0.0) || options.max_iters < 1) {
    throw ParameterError("solve: tol must be positive and max_iters at least 1");
  }

  std::optional<double> upper_sum;
  if (problem.sum_target) upper_sum = 0.5 * (*problem.sum_target - n);
  PolyProjector project_poly(n, problem.entry_lower_bound, upper_sum);

  const Eigen::MatrixXd& c = problem.objective;
  double rho = options.rho;
  if (!(rho > 0.0)) rho = std::max(1e-3, c.norm() / std::max(1, n));
  const double alpha = options.relaxation;

  Eigen::MatrixXd z;
  project_poly(options.initial ? *options.initial : Eigen::MatrixXd::Identity(n, n), z);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd x(n, n);
  Eigen::MatrixXd z_prev(n, n);
  Eigen::MatrixXd relaxed(n, n);

  SdpSolution sol;
  for (int it = 1; it <= options.max_iters; ++it) {
    x = psd_part(z - u + c / rho);
    relaxed = alpha * x + (1.0 - alpha) * z;
    z_prev.swap(z);
    project_poly(relaxed + u, z);
    u += relaxed - z;

    const double primal = (x - z).norm() / std::max({1.0, x.norm(), z.norm()});
    const double dual = rho * (z - z_prev).norm() / std::max(1.0, rho * u.norm());
    sol.iterations = it;
    sol.primal_residual = primal;
    sol.dual_residual = dual;
    if (options.on_iterate) options.on_iterate(it, x, z);
    if (std::max(primal, dual) < options.tol) {
      sol.converged = true;
      break;
    }
    if (options.adaptive_rho && it % 10 == 0) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }
  sol.X = std::move(z);
  sol.objective = c.cwiseProduct(sol.X).sum();
  return sol;
}

FeasibilityReport check_feasibility(const SdpProblem& problem, const Eigen::MatrixXd& x) {
  FeasibilityReport rep;
  rep.diagonal = (x.diagonal().array() - 1.0).abs().maxCoeff();
  rep.lower_bound = std::max(0.0, problem.entry_lower_bound - x.minCoeff());
  rep.min_eigenvalue = min_eigenvalue(0.5 * (x + x.transpose()));
  if (problem.sum_target) rep.sum = std::abs(x.sum() - *problem.sum_target);
  return rep;
}

}  // namespace ppm
