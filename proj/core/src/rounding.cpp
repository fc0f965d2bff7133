#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ppmsdp/error.hpp"
#include "ppmsdp/linalg.hpp"
#include "ppmsdp/sdp.hpp"

namespace ppm {

namespace {

double deviation(const Eigen::MatrixXd& x, const std::vector<int>& labels, double off) {
  double worst = 0.0;
  const auto n = static_cast<int>(labels.size());
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      const double target = labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]
                                ? 1.0
                                : off;
      worst = std::max(worst, std::abs(x(u, v) - target));
    }
  }
  return worst;
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[static_cast<std::size_t>(v)] != v) {
    auto& p = parent[static_cast<std::size_t>(v)];
    p = parent[static_cast<std::size_t>(p)];
    v = p;
  }
  return v;
}

// Components of the "entry above midpoint" graph, if they are r disjoint cliques.
std::optional<std::vector<int>> threshold_cliques(const Eigen::MatrixXd& x, int r) {
  const auto n = static_cast<int>(x.rows());
  const double mid = 0.5 * (1.0 - 1.0 / (r - 1));
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  for (int v = 0; v < n; ++v) {
    for (int u = v + 1; u < n; ++u) {
      if (x(u, v) > mid) parent[static_cast<std::size_t>(find_root(parent, u))] = find_root(parent, v);
    }
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> label_of_root(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (int v = 0; v < n; ++v) {
    auto& slot = label_of_root[static_cast<std::size_t>(find_root(parent, v))];
    if (slot < 0) slot = count++;
    labels[static_cast<std::size_t>(v)] = slot;
  }
  if (count != r) return std::nullopt;
  for (int v = 0; v < n; ++v) {
    for (int u = v + 1; u < n; ++u) {
      const bool same = labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)];
      if (same != (x(u, v) > mid)) return std::nullopt;
    }
  }
  return labels;
}

// Lloyd's algorithm with farthest-point seeding from vertex 0. Deterministic.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k) {
  const auto n = static_cast<int>(points.rows());
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(0);
  Eigen::VectorXd dist = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index far = 0;
    dist.maxCoeff(&far);
    centers.row(c) = points.row(far);
    dist = dist.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int v = 0; v < n; ++v) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(v) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(v)] != best) {
        assign[static_cast<std::size_t>(v)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int v = 0; v < n; ++v) {
      sums.row(assign[static_cast<std::size_t>(v)]) += points.row(v);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    }
  }
  return assign;
}

std::vector<int> canonical_order(const std::vector<int>& labels, int r) {
  std::vector<int> remap(static_cast<std::size_t>(r), -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto& slot = remap[static_cast<std::size_t>(labels[v])];
    if (slot < 0) slot = next++;
    out[v] = slot;
  }
  return out;
}

}  // namespace

RoundResult round_to_partition(const Eigen::MatrixXd& x, int r, const RoundOptions& options) {
  if (r < 2) throw ParameterError("rounding: need r >= 2");
  if (x.rows() != x.cols()) throw ParameterError("rounding: matrix must be square");
  const auto n = static_cast<int>(x.rows());
  RoundResult res;
  if (n < r) {
    res.failure = "fewer vertices than communities";
    return res;
  }
  const double off = -1.0 / (r - 1);

  std::vector<int> labels;
  if (auto cliques = threshold_cliques(x, r)) {
    labels = std::move(*cliques);
  } else {
    res.used_spectral_fallback = true;
    const SymmetricEigen eig = eigh(0.5 * (x + x.transpose()));
    const Eigen::VectorXd top = eig.values.tail(r - 1).cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd embed = eig.vectors.rightCols(r - 1) * top.asDiagonal();
    labels = kmeans(embed, r);
  }

  std::vector<int> counts(static_cast<std::size_t>(r), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  res.max_deviation = deviation(x, labels, off);
  if (std::find(counts.begin(), counts.end(), 0) != counts.end()) {
    res.failure = "empty community";
    return res;
  }
  if (!(res.max_deviation <= options.round_tol)) {
    res.failure = "not a partition matrix: max deviation " + std::to_string(res.max_deviation);
    return res;
  }
  res.labels = PartitionLabels(canonical_order(labels, r), r);
  return res;
}

}  // namespace ppm
