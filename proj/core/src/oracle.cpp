#include "ppmsdp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ppmsdp/error.hpp"

namespace ppm {

namespace {

class Enumerator {
 public:
  Enumerator(const Graph& g, int max_blocks, const OracleOptions& opt) : n_(g.num_vertices()), r_(max_blocks), opt_(opt) {
    lower_.assign(static_cast<std::size_t>(n_), 0);
    for (int v = 0; v < n_; ++v) {
      for (int u : g.neighbors(v)) {
        if (u < v) lower_[static_cast<std::size_t>(v)] |= 1u << u;
      }
    }
    rgs_.assign(static_cast<std::size_t>(n_), 0);
    masks_.assign(static_cast<std::size_t>(r_), 0);
  }

  // score(intra_edges, block sizes) is evaluated only for complete strings
  // accepted by `accept`.
  template <class Accept, class Score>
  MleResult run(int size_cap, Accept accept, Score score) {
    size_cap_ = size_cap;
    if (n_ == 0) throw ParameterError("oracle: empty graph has no partitions");
    descend(0, 0, 0, accept, score);
    if (!found_) throw ParameterError("oracle: no partition satisfies the constraints");
    result_.is_unique = result_.tie_count == 1;
    int r = 0;
    for (int b : result_.best_rgs) r = std::max(r, b + 1);
    result_.blocks = r;
    result_.best = PartitionLabels(result_.best_rgs, r);
    return std::move(result_);
  }

 private:
  template <class Accept, class Score>
  void descend(int v, int used, int intra, Accept& accept, Score& score) {
    if (v == n_) {
      std::vector<int> sizes(static_cast<std::size_t>(used));
      for (int b = 0; b < used; ++b) sizes[static_cast<std::size_t>(b)] = std::popcount(masks_[static_cast<std::size_t>(b)]);
      if (!accept(sizes)) return;
      ++result_.candidates;
      offer(score(intra, sizes));
      return;
    }
    const int limit = std::min(used + 1, r_);
    for (int b = 0; b < limit; ++b) {
      auto& mask = masks_[static_cast<std::size_t>(b)];
      if (std::popcount(mask) >= size_cap_) continue;
      const int gain = std::popcount(lower_[static_cast<std::size_t>(v)] & mask);
      rgs_[static_cast<std::size_t>(v)] = b;
      mask |= 1u << v;
      descend(v + 1, std::max(used, b + 1), intra + gain, accept, score);
      mask &= ~(1u << v);
    }
  }

  void offer(double value) {
    if (!found_ || value > result_.objective + opt_.tie_tol) {
      found_ = true;
      result_.objective = value;
      result_.best_rgs = rgs_;
      result_.tie_count = 1;
      result_.argmax.assign(1, rgs_);
    } else if (std::abs(value - result_.objective) <= opt_.tie_tol) {
      ++result_.tie_count;
      if (result_.argmax.size() < opt_.max_stored_ties) result_.argmax.push_back(rgs_);
    }
  }

  int n_;
  int r_;
  int size_cap_ = 0;
  OracleOptions opt_;
  std::vector<std::uint32_t> lower_;
  std::vector<int> rgs_;
  std::vector<std::uint32_t> masks_;
  bool found_ = false;
  MleResult result_;
};

void check_guard(const Graph& g, const OracleOptions& opt) {
  if (g.num_vertices() > opt.max_n) {
    throw ParameterError("oracle: n = " + std::to_string(g.num_vertices()) + " exceeds the enumeration limit " +
                         std::to_string(opt.max_n));
  }
  if (g.num_vertices() > 31) throw ParameterError("oracle: enumeration supports at most 31 vertices");
}

}  // namespace

MleResult mle_known_sizes(const Graph& g, std::span<const int> sizes, const OracleOptions& options) {
  check_guard(g, options);
  if (sizes.empty()) throw ParameterError("oracle: need at least one community");
  long total = 0;
  for (int s : sizes) {
    if (s < 1) throw ParameterError("oracle: community sizes must be positive");
    total += s;
  }
  if (total != g.num_vertices()) throw ParameterError("oracle: sizes must sum to n");
  std::vector<int> target(sizes.begin(), sizes.end());
  std::sort(target.begin(), target.end());
  const int r = static_cast<int>(target.size());
  Enumerator en(g, r, options);
  return en.run(
      target.back(),
      [&](std::vector<int>& got) {
        if (static_cast<int>(got.size()) != r) return false;
        std::sort(got.begin(), got.end());
        return got == target;
      },
      [](int intra, const std::vector<int>&) { return 2.0 * intra; });
}

MleResult mle_unknown_sizes(const Graph& g, int r, double omega, const OracleOptions& options) {
  check_guard(g, options);
  if (r < 1) throw ParameterError("oracle: need r >= 1");
  if (!std::isfinite(omega)) throw ParameterError("oracle: omega must be finite");
  Enumerator en(g, r, options);
  return en.run(
      g.num_vertices(), [](const std::vector<int>&) { return true; },
      [&](int intra, const std::vector<int>& sizes) {
        double sq = 0.0;
        for (int s : sizes) sq += static_cast<double>(s) * s;
        return 2.0 * intra - omega * sq;
      });
}

double partition_objective(const Graph& g, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != g.num_vertices()) throw ParameterError("objective: label count mismatch");
  double s = 0.0;
  for (int u = 0; u < g.num_vertices(); ++u) {
    for (int v : g.neighbors(u)) {
      if (labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]) s += 1.0;
    }
  }
  return s;
}

double loglikelihood(const Graph& g, const PartitionLabels& labels, double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw ParameterError("loglikelihood: requires p and q strictly between 0 and 1");
  }
  const int n = g.num_vertices();
  if (labels.num_vertices() != n) throw ParameterError("loglikelihood: label count mismatch");
  double intra_pairs = 0.0;
  for (int s : labels.sizes()) intra_pairs += 0.5 * s * (s - 1.0);
  const double all_pairs = 0.5 * n * (n - 1.0);
  double intra_edges = 0.0;
  for (const Edge& e : g.edges()) intra_edges += labels.same_community(e.u, e.v) ? 1.0 : 0.0;
  const double inter_edges = static_cast<double>(g.num_edges()) - intra_edges;
  const double inter_pairs = all_pairs - intra_pairs;
  return intra_edges * std::log(p) + (intra_pairs - intra_edges) * std::log1p(-p) + inter_edges * std::log(q) +
         (inter_pairs - inter_edges) * std::log1p(-q);
}

}  // namespace ppm
