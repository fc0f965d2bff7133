#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppmsdp/graph.hpp"

namespace ppm {

struct OracleOptions {
  /// Enumeration guard; raising it is at the caller's risk.
  int max_n = 14;
  /// Cap on the number of tied maximizers stored (all are counted).
  std::size_t max_stored_ties = 10000;
  /// Objectives within this absolute distance count as tied.
  double tie_tol = 1e-9;
};

struct MleResult {
  /// Best partition as a restricted growth string (lexicographically smallest
  /// among maximizers), and as labels with one community per block.
  std::vector<int> best_rgs;
  PartitionLabels best;
  int blocks = 0;
  double objective = 0.0;
  bool is_unique = true;
  std::uint64_t tie_count = 1;
  std::vector<std::vector<int>> argmax;  // restricted growth strings, at most max_stored_ties
  std::uint64_t candidates = 0;
};

/// Maximizes <A,X> over partition matrices whose block sizes are a
/// permutation of `sizes`. <A,X> counts ordered adjacent same-block pairs.
/// Throws ParameterError when n exceeds the guard or the sizes do not sum to n.
MleResult mle_known_sizes(const Graph& g, std::span<const int> sizes, const OracleOptions& options = {});

/// Maximizes <A,X> - omega sum_i s_i^2 over partitions into at most r blocks.
MleResult mle_unknown_sizes(const Graph& g, int r, double omega, const OracleOptions& options = {});

/// Exact log-likelihood of the graph under the planted partition with edge
/// probability p inside communities and q across. Requires p, q in (0, 1).
double loglikelihood(const Graph& g, const PartitionLabels& labels, double p, double q);

/// <A,X> for the 0/1 partition matrix of the labels.
double partition_objective(const Graph& g, std::span<const int> labels);

}  // namespace ppm
