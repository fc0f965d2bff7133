#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ppmsdp/model.hpp"

namespace ppm {

/// Coefficients of the reduced log-likelihood alpha <A,X> - beta <J,X>.
struct RegimeConstants {
  double alpha = 0.0;  // log p(1-q) / (q(1-p))
  double beta = 0.0;   // log (1-q) / (1-p)
  double omega = 0.0;  // beta / alpha, strictly between q and p
  double tau = 0.0;    // (p~ - q~) / (log p~ - log q~)
};

/// Regularizer beta/alpha. Requires 0 < q < p < 1; the result lies in (q, p).
double compute_omega(double p, double q);

/// Rate constant (p~ - q~)/(log p~ - log q~). At p~ == q~ the limit p~ is returned.
double compute_tau(double p_tilde, double q_tilde);

RegimeConstants regime_constants(const PlantedPartitionParams& params);

/// sqrt(tau^2 (pi_i - pi_j)^2 + 4 pi_i pi_j p~ q~).
double pair_discriminant(double tau, double pi_i, double pi_j, double p_tilde, double q_tilde);

struct DivergenceValue {
  double value = 0.0;
  double t_star = 0.0;
};

/// Chernoff-Hellinger divergence between communities i and j of SBM(q_tilde, pi):
/// sup over t in [0,1] of sum_k pi_k (t Q_ik + (1-t) Q_jk - Q_ik^t Q_jk^(1-t)).
/// The supremand is concave in t; the maximizer is located by bisection on the
/// derivative. Throws ParameterError on non-positive rates or i == j.
DivergenceValue ch_divergence_numeric(const Eigen::MatrixXd& q_tilde, std::span<const double> pi,
                                      int i, int j);

/// Closed form of the planted-partition divergence between two communities
/// with proportions pi_i, pi_j. Returns 0 when p~ == q~.
double ch_divergence_closed_form(double p_tilde, double q_tilde, double pi_i, double pi_j);
double ch_divergence_closed_form(const PlantedPartitionParams& params, int i, int j);

/// Divergence restricted to the k in {i, j} terms; never exceeds the full one.
DivergenceValue monotone_divergence(const Eigen::MatrixXd& q_tilde, std::span<const double> pi,
                                    int i, int j);

struct PairDivergence {
  int i = 0;
  int j = 0;
  double value = 0.0;
  double t_star = 0.0;
};

struct DivergenceReport {
  std::vector<PairDivergence> pairs;  // all i < j
  std::pair<int, int> min_pair{0, 1};
  double min_value = 0.0;
  /// Strict: min over pairs must exceed 1.
  bool feasible = false;
  /// Planted partition only: the two smallest communities, where the minimum
  /// must be attained by monotonicity of the divergence in the proportions.
  std::optional<std::pair<int, int>> predicted_min_pair;

  double value(int i, int j) const;
};

/// All-pairs report for a planted partition model (closed form).
DivergenceReport feasibility_report(const PlantedPartitionParams& params);
/// All-pairs report for a general rate matrix (numeric supremum).
DivergenceReport feasibility_report(const Eigen::MatrixXd& q_tilde, std::span<const double> pi);

}  // namespace ppm
