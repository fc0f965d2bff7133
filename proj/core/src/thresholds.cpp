#include "ppmsdp/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppmsdp/error.hpp"

namespace ppm {

double compute_omega(double p, double q) {
  if (!(q > 0.0 && q < p && p < 1.0)) {
    throw ParameterError("omega: requires 0 < q < p < 1");
  }
  const double beta = std::log1p(-q) - std::log1p(-p);
  const double alpha = std::log(p) - std::log(q) + beta;
  return beta / alpha;
}

double compute_tau(double p_tilde, double q_tilde) {
  if (!(p_tilde > 0.0 && q_tilde > 0.0)) throw ParameterError("tau: rates must be positive");
  if (p_tilde == q_tilde) return p_tilde;
  return (p_tilde - q_tilde) / (std::log(p_tilde) - std::log(q_tilde));
}

RegimeConstants regime_constants(const PlantedPartitionParams& params) {
  params.validate();
  const double p = params.p();
  const double q = params.q();
  RegimeConstants c;
  c.beta = std::log1p(-q) - std::log1p(-p);
  c.alpha = std::log(p) - std::log(q) + c.beta;
  c.omega = c.beta / c.alpha;
  c.tau = compute_tau(params.p_tilde, params.q_tilde);
  return c;
}

double pair_discriminant(double tau, double pi_i, double pi_j, double p_tilde, double q_tilde) {
  const double d = pi_i - pi_j;
  return std::sqrt(tau * tau * d * d + 4.0 * pi_i * pi_j * p_tilde * q_tilde);
}

namespace {

void check_rates(const Eigen::MatrixXd& q_tilde, std::span<const double> pi, int i, int j) {
  const auto r = static_cast<int>(pi.size());
  if (q_tilde.rows() != r || q_tilde.cols() != r) {
    throw ParameterError("divergence: rate matrix must be r x r with r = |pi|");
  }
  if (i < 0 || j < 0 || i >= r || j >= r || i == j) {
    throw ParameterError("divergence: need distinct communities i, j in range");
  }
  if ((q_tilde.array() <= 0.0).any()) {
    throw ParameterError("divergence: rates must be positive");
  }
  for (double x : pi) {
    if (!(x > 0.0)) throw ParameterError("divergence: proportions must be positive");
  }
}

// Maximizes the concave supremand over t in [0, 1] using only the listed k.
DivergenceValue supremum_over_t(const Eigen::MatrixXd& rates, std::span<const double> pi, int i,
                                int j, std::span<const int> ks) {
  struct Term {
    double weight, a, b, log_ratio;
  };
  std::vector<Term> terms;
  for (int k : ks) {
    const double a = rates(i, k);
    const double b = rates(j, k);
    if (a == b) continue;  // term vanishes identically
    terms.push_back({pi[static_cast<std::size_t>(k)], a, b, std::log(a / b)});
  }
  const auto value = [&](double t) {
    double s = 0.0;
    for (const Term& x : terms) {
      s += x.weight * (t * x.a + (1.0 - t) * x.b - x.b * std::exp(t * x.log_ratio));
    }
    return s;
  };
  const auto slope = [&](double t) {
    double s = 0.0;
    for (const Term& x : terms) {
      s += x.weight * (x.a - x.b - x.b * std::exp(t * x.log_ratio) * x.log_ratio);
    }
    return s;
  };
  if (terms.empty()) return {0.0, 0.5};
  if (slope(0.0) <= 0.0) return {std::max(0.0, value(0.0)), 0.0};
  if (slope(1.0) >= 0.0) return {std::max(0.0, value(1.0)), 1.0};
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return {value(t), t};
}

}  // namespace

DivergenceValue ch_divergence_numeric(const Eigen::MatrixXd& q_tilde, std::span<const double> pi,
                                      int i, int j) {
  check_rates(q_tilde, pi, i, j);
  std::vector<int> ks(pi.size());
  std::iota(ks.begin(), ks.end(), 0);
  return supremum_over_t(q_tilde, pi, i, j, ks);
}

DivergenceValue monotone_divergence(const Eigen::MatrixXd& q_tilde, std::span<const double> pi,
                                    int i, int j) {
  check_rates(q_tilde, pi, i, j);
  const int ks[] = {i, j};
  return supremum_over_t(q_tilde, pi, i, j, ks);
}

namespace {

struct ClosedForm {
  double value;
  double t_star;
};

ClosedForm closed_form(double p_tilde, double q_tilde, double pi_i, double pi_j) {
  if (!(q_tilde > 0.0)) throw ParameterError("divergence: q_tilde must be positive");
  if (p_tilde < q_tilde) throw ParameterError("divergence: requires p_tilde >= q_tilde");
  if (!(pi_i > 0.0 && pi_j > 0.0)) throw ParameterError("divergence: proportions must be positive");
  if (p_tilde == q_tilde) return {0.0, 0.5};
  const double tau = compute_tau(p_tilde, q_tilde);
  const double d = pi_i - pi_j;
  const double gamma = pair_discriminant(tau, pi_i, pi_j, p_tilde, q_tilde);
  // (tau d + gamma)(gamma - tau d) = 4 pi_i pi_j p q; use the product form for
  // whichever factor suffers cancellation.
  const double prod = 4.0 * pi_i * pi_j * p_tilde * q_tilde;
  double num = tau * d + gamma;
  double den = gamma - tau * d;
  if (d >= 0.0) {
    den = prod / num;
  } else {
    num = prod / den;
  }
  const double log_arg = std::log(pi_j * p_tilde / (pi_i * q_tilde)) + std::log(num / den);
  const double value = pi_i * q_tilde + pi_j * p_tilde - gamma + 0.5 * tau * d * log_arg;
  // At the optimum u = t log(p~/q~) and e^{2u} equals the log argument.
  const double t = std::clamp(0.5 * log_arg / std::log(p_tilde / q_tilde), 0.0, 1.0);
  return {value, t};
}

}  // namespace

double ch_divergence_closed_form(double p_tilde, double q_tilde, double pi_i, double pi_j) {
  // canonical argument order
  if (pi_i < pi_j) std::swap(pi_i, pi_j);
  return closed_form(p_tilde, q_tilde, pi_i, pi_j).value;
}

double ch_divergence_closed_form(const PlantedPartitionParams& params, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= static_cast<int>(params.pi.size()) ||
      j >= static_cast<int>(params.pi.size())) {
    throw ParameterError("divergence: need distinct communities i, j in range");
  }
  return ch_divergence_closed_form(params.p_tilde, params.q_tilde,
                                   params.pi[static_cast<std::size_t>(i)],
                                   params.pi[static_cast<std::size_t>(j)]);
}

double DivergenceReport::value(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const auto& pd : pairs) {
    if (pd.i == i && pd.j == j) return pd.value;
  }
  throw ParameterError("divergence report: no such pair");
}

namespace {

void finalize(DivergenceReport& rep) {
  if (rep.pairs.empty()) throw ParameterError("divergence report: need at least two communities");
  const auto it = std::min_element(rep.pairs.begin(), rep.pairs.end(),
                                   [](const auto& a, const auto& b) { return a.value < b.value; });
  rep.min_pair = {it->i, it->j};
  rep.min_value = it->value;
  rep.feasible = rep.min_value > 1.0;
}

}  // namespace

DivergenceReport feasibility_report(const PlantedPartitionParams& params) {
  const auto r = static_cast<int>(params.pi.size());
  if (r != params.r || r < 2) throw ParameterError("divergence report: pi must have length r >= 2");
  DivergenceReport rep;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const auto cf = closed_form(params.p_tilde, params.q_tilde,
                                  params.pi[static_cast<std::size_t>(i)],
                                  params.pi[static_cast<std::size_t>(j)]);
      rep.pairs.push_back({i, j, ch_divergence_closed_form(params, i, j), cf.t_star});
    }
  }
  finalize(rep);
  std::vector<int> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return params.pi[static_cast<std::size_t>(a)] < params.pi[static_cast<std::size_t>(b)];
  });
  rep.predicted_min_pair = std::minmax(order[0], order[1]);
  return rep;
}

DivergenceReport feasibility_report(const Eigen::MatrixXd& q_tilde, std::span<const double> pi) {
  const auto r = static_cast<int>(pi.size());
  DivergenceReport rep;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const auto dv = ch_divergence_numeric(q_tilde, pi, i, j);
      rep.pairs.push_back({i, j, dv.value, dv.t_star});
    }
  }
  finalize(rep);
  return rep;
}

}  // namespace ppm
