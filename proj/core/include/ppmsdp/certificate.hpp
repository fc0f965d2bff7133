#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppmsdp/graph.hpp"
#include "ppmsdp/model.hpp"

namespace ppm {

/// Model quantities the dual construction needs: the regularizer omega and
/// the edge probabilities p, q that fix the deterministic interval centres.
struct CertificateInputs {
  double omega = 0.0;
  double p = 0.0;
  double q = 0.0;
  /// Overrides c = (omega - q) s_min s_2ndmin / 2.
  std::optional<double> c;

  /// omega from the model's regime constants, p and q from its rates.
  static CertificateInputs from_params(const PlantedPartitionParams& params);
};

/// Dual solution (nu, Gamma) for the unknown-sizes program, built so that
/// Lambda = diag(nu) + omega J - A - Gamma annihilates every 1_i - 1_j.
struct DualCertificate {
  int n = 0;
  int r = 0;
  double omega = 0.0;
  double p = 0.0;
  double q = 0.0;
  double c = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::vector<int> sizes;
  std::vector<int> community;  // community of each vertex

  Eigen::VectorXd alpha;        // per vertex interval, lower end
  Eigen::VectorXd beta;         // per vertex interval, upper end
  Eigen::VectorXd alpha_bar;    // per community
  Eigen::VectorXd beta_bar;     // per community
  Eigen::VectorXd kappa;        // per community, clamped to [0, 1]
  Eigen::VectorXd delta;        // per community
  Eigen::VectorXd gamma_prime;  // per vertex
  Eigen::VectorXd gamma;        // per vertex
  Eigen::VectorXd nu;           // per vertex
  Eigen::MatrixXd R;            // n x r, R(v, own community) = 0
  Eigen::MatrixXd T;            // r x r, zero diagonal
  Eigen::MatrixXd Gamma;        // n x n
  Eigen::MatrixXd Lambda;       // n x n

  /// False when some T_ij <= 0, in which case that block of Gamma is left zero.
  bool construction_ok = true;
  std::string construction_failure;
};

/// Throws ParameterError when r < 2, n < 3, or the truth does not match the graph.
DualCertificate build_certificate(const Graph& g, const PartitionLabels& truth,
                                  const CertificateInputs& inputs);
DualCertificate build_certificate(const Graph& g, const PartitionLabels& truth,
                                  const PlantedPartitionParams& params);

struct CertificateReport {
  bool construction_ok = false;
  std::string construction_failure;

  // Diagnostics that do not enter the verdict.
  bool intervals_nonempty = false;
  double interval_margin = 0.0;  // min_v beta_v - alpha_v
  double nu_min = 0.0;
  double nu_reference = 0.0;  // log n / log log n

  bool lambda_consistent = false;  // Lambda = diag(nu) + omega J - A - Gamma
  double lambda_residual = 0.0;
  bool R_positive = false;
  double R_min = 0.0;
  bool gamma_symmetric = false;
  bool gamma_diagonal_blocks_zero = false;
  bool gamma_off_blocks_positive = false;
  double gamma_off_block_min = 0.0;

  double kernel_residual = 0.0;  // max_{i<j} ||Lambda (1_i - 1_j)||_inf
  double kernel_tolerance = 0.0;
  bool kernel_ok = false;

  double lambda_norm = 0.0;  // spectral norm
  double psd_margin = 0.0;   // min eigenvalue of P^T Lambda P
  double psd_tolerance = 0.0;
  bool psd_ok = false;  // strict: margin > tolerance

  double primal_objective = 0.0;  // <A,Xhat> - omega <J,Xhat>
  double dual_objective = 0.0;    // sum nu + <J,Gamma>/(r-1)
  double slackness_gap = 0.0;
  double slackness_tolerance = 0.0;
  bool slackness_ok = false;

  bool verified = false;
};

/// Checks the sufficient conditions for the truth to be the unique optimum of
/// both programs: Lambda psd and positive definite off span{1_i - 1_j},
/// Gamma zero on diagonal blocks and entrywise positive elsewhere, and
/// span{1_i - 1_j} inside ker(Lambda). Never throws on a failed check.
CertificateReport verify_certificate(const Graph& g, const PartitionLabels& truth,
                                     const DualCertificate& cert);

/// Orthonormal basis of the orthogonal complement of span{1_i - 1_j}: block
/// Helmert vectors summing to zero on each community, plus sum_i 1_i / s_i
/// normalized. n x (n - r + 1).
Eigen::MatrixXd complement_basis(const PartitionLabels& truth);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;  // worst case when the identity is vector valued
  double rhs = 0.0;
  double error = 0.0;  // relative
  double tolerance = 1e-9;
  bool pass = false;
};

/// Closed-form identities of the construction, each side evaluated independently.
std::vector<IdentityCheck> algebraic_identity_suite(const DualCertificate& cert, const Graph& g,
                                                    const PartitionLabels& truth);

struct IntervalMargins {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd margin;  // beta - alpha
  double min_margin = 0.0;
  int argmin = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

/// Per-vertex intervals [alpha_v, beta_v] with the final eps1, eps2.
IntervalMargins interval_margins(const Graph& g, const PartitionLabels& truth,
                                 const CertificateInputs& inputs);
IntervalMargins interval_margins(const Graph& g, const PartitionLabels& truth,
                                 const PlantedPartitionParams& params);

}  // namespace ppm
