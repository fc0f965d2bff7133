#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ppmsdp/graph.hpp"

namespace ppm {

/// Planted partition model in the logarithmic-degree regime:
/// p = p_tilde log(n)/n within communities, q = q_tilde log(n)/n across.
struct PlantedPartitionParams {
  int n = 0;
  int r = 0;
  std::vector<double> pi;
  double p_tilde = 0.0;
  double q_tilde = 0.0;

  double p() const;
  double q() const;

  /// Throws ParameterError unless pi is a positive probability vector of
  /// length r, p_tilde > q_tilde > 0 and 0 < q < p < 1.
  void validate() const;

  /// Largest-remainder rounding of pi * n; ties go to the lower index.
  /// Throws ParameterError when some community would be empty.
  std::vector<int> community_sizes() const;
};

/// Sampled graph together with its ground truth.
struct PlantedSample {
  Graph graph;
  PartitionLabels truth;
};

/// Communities are contiguous vertex ranges in index order. Each pair draws
/// one uniform from its own counter-based substream (see rng.hpp).
PlantedSample sample_ppm(const PlantedPartitionParams& params, std::uint64_t seed);

/// Same sampler with explicit probabilities in [0, 1] (degenerate values
/// allowed) and caller-supplied labels. sample_ppm delegates here.
Graph sample_planted_partition(const PartitionLabels& truth, double p, double q,
                               std::uint64_t seed);

/// r x r rate matrix with p_tilde on the diagonal and q_tilde elsewhere.
Eigen::MatrixXd planted_rate_matrix(int r, double p_tilde, double q_tilde);

/// True when `target` can be reached from `base` by monotone changes:
/// target_ii >= base_ii and target_ij <= base_ij for i != j. In block model
/// ordering `target` then dominates `base`.
bool bm_dominates(const Eigen::MatrixXd& target, const Eigen::MatrixXd& base);

/// Every intra-community rate exceeds every inter-community rate.
bool strongly_assortative(const Eigen::MatrixXd& rates);

// ---------------------------------------------------------------------------
// Monotone adversaries

struct EdgeChange {
  enum class Op { kAdd, kRemove };
  Op op = Op::kAdd;
  int u = 0;
  int v = 0;

  friend bool operator==(const EdgeChange&, const EdgeChange&) = default;
};

enum class AdversaryKind {
  kNone,
  kRandomMonotone,
  kSubcommunityPlant,
  kHubPlant,
  kSbmDominate,
  kScripted,
};

std::string to_string(AdversaryKind kind);
AdversaryKind adversary_kind_from_string(const std::string& name);

/// Parameters for every adversary kind; only the fields of `kind` are read.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kNone;

  // kRandomMonotone: each missing intra pair is added w.p. add_prob, each
  // present inter edge removed w.p. remove_prob.
  double add_prob = 0.0;
  double remove_prob = 0.0;

  // kSubcommunityPlant: plant_size vertices drawn from `community`; each
  // missing pair among them is added w.p. plant_density (1 plants a clique).
  int community = 0;
  int plant_size = 0;
  double plant_density = 1.0;

  // kHubPlant: hub_count hubs drawn from all vertices, each gaining up to
  // hub_degree new neighbours inside its own community.
  int hub_count = 0;
  int hub_degree = 0;

  // kSbmDominate: target rate matrix and the base planted-partition rates.
  Eigen::MatrixXd target_rates;
  double base_p_tilde = 0.0;
  double base_q_tilde = 0.0;

  // kScripted: explicit change list.
  std::vector<EdgeChange> script;
};

struct AdversaryResult {
  Graph graph;
  /// Changes actually applied, in application order (no-ops omitted).
  std::vector<EdgeChange> changes;
};

/// Applies a monotone adversary. Throws ParameterError on invalid specs; a
/// scripted non-monotone change is rejected naming the offending pair.
AdversaryResult apply_adversary(const Graph& g, const PartitionLabels& truth,
                                const AdversarySpec& spec, std::uint64_t seed);

/// Additions must be intra-community, removals inter-community.
bool is_monotone(const EdgeChange& change, const PartitionLabels& truth);

/// First pair whose change from `before` to `after` is not monotone, if any.
std::optional<Edge> find_non_monotone_change(const Graph& before, const Graph& after,
                                             const PartitionLabels& truth);

/// Thins/superposes a planted-partition sample into SBM(n, target, pi):
/// within community i a non-edge is added w.p. (Q'_ii - p) / (1 - p); between
/// communities i != j an edge is removed w.p. (q - Q'_ij) / q.
AdversaryResult simulate_dominating_sbm(const Graph& g, const PartitionLabels& truth,
                                        const Eigen::MatrixXd& target_rates,
                                        const PlantedPartitionParams& base, std::uint64_t seed);

}  // namespace ppm
