#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppmsdp/graph.hpp"

namespace ppm {

/// Centered partition matrix: 1 within a community, -1/(r-1) across.
/// Positive semidefinite of rank r-1.
Eigen::MatrixXd centered_partition_matrix(const PartitionLabels& labels);

/// <J, X> of every centered partition matrix with the given sizes:
/// r/(r-1) sum s_i^2 - n^2/(r-1).
double centered_sum_target(std::span<const int> sizes);

/// Either the known-sizes program
///   max <A,X>  s.t. <J,X> = target, X_uu = 1, X >= -1/(r-1), X psd,
/// or the unknown-sizes program
///   max <A,X> - omega <J,X>  s.t. X_uu = 1, X >= -1/(r-1), X psd.
struct SdpProblem {
  enum class Mode { kKnownSizes, kUnknownSizes };

  Mode mode = Mode::kUnknownSizes;
  int n = 0;
  int r = 2;
  Eigen::MatrixXd objective;         // A, or A - omega J
  double entry_lower_bound = -1.0;   // -1/(r-1)
  std::optional<double> sum_target;  // known sizes only
  double omega = 0.0;                // unknown sizes only
};

/// Throws ParameterError unless the sizes are positive and sum to n.
SdpProblem build_known_sizes(const Graph& g, std::span<const int> sizes);

/// Throws ParameterError unless r >= 2 and 0 <= omega < 1.
SdpProblem build_unknown_sizes(const Graph& g, int r, double omega);

struct SolverOptions {
  double tol = 1e-6;
  int max_iters = 20000;
  /// Initial penalty; <= 0 picks a scale from the objective.
  double rho = 0.0;
  double relaxation = 1.6;
  bool adaptive_rho = true;
  /// Optional warm start for the polyhedral iterate.
  std::optional<Eigen::MatrixXd> initial;
  /// Called every iteration with (iteration, PSD iterate, polyhedral iterate).
  std::function<void(int, const Eigen::MatrixXd&, const Eigen::MatrixXd&)> on_iterate;
};

struct SdpSolution {
  Eigen::MatrixXd X;  // satisfies diagonal, entry and sum constraints exactly
  double objective = 0.0;
  double primal_residual = 0.0;  // relative ||X_psd - X_poly||_F
  double dual_residual = 0.0;    // relative rho ||X_poly - X_poly_prev||_F
  int iterations = 0;
  bool converged = false;
};

/// Operator splitting (ADMM) between the PSD cone and the polyhedron
/// {diag = 1, entries >= -1/(r-1), optional <J,X> = target}. Both projections
/// are exact: the PSD step uses a partial eigendecomposition, the polyhedral
/// step a one-dimensional threshold search. Never throws on non-convergence;
/// the last iterate is returned with converged = false.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// Objective of X for the program defined by g:
/// <A,X>, or <A,X> - omega <J,X> when omega is given.
double objective_value(const Graph& g, const Eigen::MatrixXd& x,
                       std::optional<double> omega = std::nullopt);

/// Maximum violation of diag = 1, X >= lower, and psd (via min eigenvalue).
struct FeasibilityReport {
  double diagonal = 0.0;
  double lower_bound = 0.0;
  double min_eigenvalue = 0.0;
  double sum = 0.0;  // |<J,X> - target| for known sizes
};
FeasibilityReport check_feasibility(const SdpProblem& problem, const Eigen::MatrixXd& x);

// ---------------------------------------------------------------------------
// Rounding

struct RoundOptions {
  double round_tol = 0.1;
};

struct RoundResult {
  std::optional<PartitionLabels> labels;
  /// max |X - Xhat(labels)| for the best candidate labels found.
  double max_deviation = 0.0;
  bool used_spectral_fallback = false;
  std::string failure;  // empty on success

  bool ok() const { return labels.has_value(); }
};

/// Snaps X to a centered partition matrix. Entries above the midpoint
/// (1 - 1/(r-1))/2 mark same-community pairs; if they form exactly r disjoint
/// cliques those are the communities, otherwise the rows of the top r-1
/// eigenvectors are clustered with k-means. Succeeds only when every community
/// is nonempty and the resulting centered matrix is within round_tol of X.
RoundResult round_to_partition(const Eigen::MatrixXd& x, int r, const RoundOptions& options = {});

}  // namespace ppm
