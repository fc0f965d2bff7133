#include "ppmsdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppmsdp/error.hpp"
#include "ppmsdp/rng.hpp"

namespace ppm {

double PlantedPartitionParams::p() const {
  return p_tilde * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

double PlantedPartitionParams::q() const {
  return q_tilde * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

void PlantedPartitionParams::validate() const {
  if (n < 2) throw ParameterError("model: n must be at least 2");
  if (r < 2) throw ParameterError("model: r must be at least 2");
  if (static_cast<int>(pi.size()) != r) throw ParameterError("model: pi must have length r");
  double total = 0.0;
  for (double x : pi) {
    if (!(x > 0.0)) throw ParameterError("model: proportions must be positive");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("model: proportions must sum to 1");
  if (!(q_tilde > 0.0)) throw ParameterError("model: q_tilde must be positive");
  if (!(p_tilde > q_tilde)) throw ParameterError("model: requires p_tilde > q_tilde");
  if (!(p() < 1.0)) throw ParameterError("model: p = p_tilde log n / n must be below 1");
}

std::vector<int> PlantedPartitionParams::community_sizes() const {
  if (static_cast<int>(pi.size()) != r || r < 1) {
    throw ParameterError("model: pi must have length r");
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  std::vector<int> sizes(static_cast<std::size_t>(r));
  std::vector<double> remainder(static_cast<std::size_t>(r));
  int assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double quota = pi[i] / total * n;
    sizes[i] = static_cast<int>(std::floor(quota));
    remainder[i] = quota - sizes[i];
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % order.size()]];
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) {
      throw ParameterError("model: rounding empties community " + std::to_string(i));
    }
  }
  return sizes;
}

Graph sample_planted_partition(const PartitionLabels& truth, double p, double q,
                               std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw ParameterError("model: edge probabilities must lie in [0, 1]");
  }
  const int n = truth.num_vertices();
  Graph g(n);
  const PairStream stream(seed, Stream::kEdges);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double prob = truth.same_community(u, v) ? p : q;
      if (stream.uniform(u, v) < prob) g.add_edge(u, v);
    }
  }
  return g;
}

PlantedSample sample_ppm(const PlantedPartitionParams& params, std::uint64_t seed) {
  params.validate();
  auto truth = PartitionLabels::from_sizes(params.community_sizes());
  Graph g = sample_planted_partition(truth, params.p(), params.q(), seed);
  return {std::move(g), std::move(truth)};
}

Eigen::MatrixXd planted_rate_matrix(int r, double p_tilde, double q_tilde) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(r, r, q_tilde);
  m.diagonal().setConstant(p_tilde);
  return m;
}

bool bm_dominates(const Eigen::MatrixXd& target, const Eigen::MatrixXd& base) {
  if (target.rows() != base.rows() || target.cols() != base.cols()) return false;
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
      if (i == j ? target(i, j) < base(i, j) : target(i, j) > base(i, j)) return false;
    }
  }
  return true;
}

bool strongly_assortative(const Eigen::MatrixXd& rates) {
  const Eigen::Index r = rates.rows();
  double min_intra = std::numeric_limits<double>::infinity();
  double max_inter = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      if (i == j) {
        min_intra = std::min(min_intra, rates(i, j));
      } else {
        max_inter = std::max(max_inter, rates(i, j));
      }
    }
  }
  return min_intra > max_inter;
}

}  // namespace ppm
