#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppmsdp/error.hpp"
#include "ppmsdp/model.hpp"
#include "ppmsdp/rng.hpp"

namespace ppm {

namespace {

void check_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ParameterError(std::string("adversary: ") + name + " must lie in [0, 1]");
  }
}

std::string pair_text(int u, int v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

// Partial Fisher-Yates: first k entries become a uniform random k-subset.
void shuffle_prefix(std::vector<int>& items, std::size_t k, SplitMix64& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    std::swap(items[i], items[j]);
  }
}

class ChangeRecorder {
 public:
  explicit ChangeRecorder(const Graph& g) : result_{g, {}} {}

  void add(int u, int v) {
    if (result_.graph.add_edge(u, v)) {
      const Edge e = make_edge(u, v);
      result_.changes.push_back({EdgeChange::Op::kAdd, e.u, e.v});
    }
  }

  void remove(int u, int v) {
    if (result_.graph.remove_edge(u, v)) {
      const Edge e = make_edge(u, v);
      result_.changes.push_back({EdgeChange::Op::kRemove, e.u, e.v});
    }
  }

  const Graph& graph() const { return result_.graph; }
  AdversaryResult take() { return std::move(result_); }

 private:
  AdversaryResult result_;
};

AdversaryResult random_monotone(const Graph& g, const PartitionLabels& truth,
                                const AdversarySpec& spec, std::uint64_t seed) {
  check_probability(spec.add_prob, "add_prob");
  check_probability(spec.remove_prob, "remove_prob");
  ChangeRecorder rec(g);
  const PairStream stream(seed, Stream::kAdversaryPairs);
  const int n = g.num_vertices();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool present = g.has_edge(u, v);
      if (truth.same_community(u, v)) {
        if (!present && stream.uniform(u, v) < spec.add_prob) rec.add(u, v);
      } else if (present && stream.uniform(u, v) < spec.remove_prob) {
        rec.remove(u, v);
      }
    }
  }
  return rec.take();
}

AdversaryResult subcommunity_plant(const Graph& g, const PartitionLabels& truth,
                                   const AdversarySpec& spec, std::uint64_t seed) {
  if (spec.community < 0 || spec.community >= truth.num_communities()) {
    throw ParameterError("adversary: plant community out of range");
  }
  check_probability(spec.plant_density, "plant_density");
  std::vector<int> members = truth.members(spec.community);
  if (spec.plant_size < 2 || spec.plant_size > static_cast<int>(members.size())) {
    throw ParameterError("adversary: plant_size must lie in [2, community size]");
  }
  SplitMix64 rng(seed, Stream::kAdversaryChoice);
  shuffle_prefix(members, static_cast<std::size_t>(spec.plant_size), rng);
  members.resize(static_cast<std::size_t>(spec.plant_size));
  std::sort(members.begin(), members.end());

  ChangeRecorder rec(g);
  const PairStream stream(seed, Stream::kAdversaryPairs);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const int u = members[a];
      const int v = members[b];
      if (!g.has_edge(u, v) && stream.uniform(u, v) < spec.plant_density) rec.add(u, v);
    }
  }
  return rec.take();
}

AdversaryResult hub_plant(const Graph& g, const PartitionLabels& truth, const AdversarySpec& spec,
                          std::uint64_t seed) {
  const int n = g.num_vertices();
  if (spec.hub_count < 0 || spec.hub_count > n || spec.hub_degree < 0) {
    throw ParameterError("adversary: hub_count must lie in [0, n] and hub_degree >= 0");
  }
  SplitMix64 rng(seed, Stream::kAdversaryChoice);
  std::vector<int> vertices(static_cast<std::size_t>(n));
  std::iota(vertices.begin(), vertices.end(), 0);
  shuffle_prefix(vertices, static_cast<std::size_t>(spec.hub_count), rng);
  vertices.resize(static_cast<std::size_t>(spec.hub_count));

  ChangeRecorder rec(g);
  for (int hub : vertices) {
    std::vector<int> candidates;
    for (int w : truth.members(truth[hub])) {
      if (w != hub && !rec.graph().has_edge(hub, w)) candidates.push_back(w);
    }
    shuffle_prefix(candidates, static_cast<std::size_t>(spec.hub_degree), rng);
    const auto k = std::min(candidates.size(), static_cast<std::size_t>(spec.hub_degree));
    for (std::size_t t = 0; t < k; ++t) rec.add(hub, candidates[t]);
  }
  return rec.take();
}

AdversaryResult scripted(const Graph& g, const PartitionLabels& truth, const AdversarySpec& spec) {
  for (const EdgeChange& c : spec.script) {
    if (c.u < 0 || c.v < 0 || c.u >= g.num_vertices() || c.v >= g.num_vertices() || c.u == c.v) {
      throw ParameterError("adversary: invalid pair " + pair_text(c.u, c.v));
    }
    if (!is_monotone(c, truth)) {
      throw ParameterError(std::string("adversary: non-monotone ") +
                           (c.op == EdgeChange::Op::kAdd ? "addition" : "removal") +
                           " of pair " + pair_text(c.u, c.v));
    }
  }
  ChangeRecorder rec(g);
  for (const EdgeChange& c : spec.script) {
    if (c.op == EdgeChange::Op::kAdd) {
      rec.add(c.u, c.v);
    } else {
      rec.remove(c.u, c.v);
    }
  }
  return rec.take();
}

}  // namespace

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kRandomMonotone: return "random_monotone";
    case AdversaryKind::kSubcommunityPlant: return "subcommunity_plant";
    case AdversaryKind::kHubPlant: return "hub_plant";
    case AdversaryKind::kSbmDominate: return "sbm_dominate";
    case AdversaryKind::kScripted: return "scripted";
  }
  return "unknown";
}

AdversaryKind adversary_kind_from_string(const std::string& name) {
  for (auto kind : {AdversaryKind::kNone, AdversaryKind::kRandomMonotone,
                    AdversaryKind::kSubcommunityPlant, AdversaryKind::kHubPlant,
                    AdversaryKind::kSbmDominate, AdversaryKind::kScripted}) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("adversary: unknown kind \"" + name + "\"");
}

bool is_monotone(const EdgeChange& change, const PartitionLabels& truth) {
  const bool same = truth.same_community(change.u, change.v);
  return change.op == EdgeChange::Op::kAdd ? same : !same;
}

std::optional<Edge> find_non_monotone_change(const Graph& before, const Graph& after,
                                             const PartitionLabels& truth) {
  const int n = before.num_vertices();
  if (after.num_vertices() != n || truth.num_vertices() != n) {
    throw ParameterError("monotonicity audit: vertex counts differ");
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool b = before.has_edge(u, v);
      const bool a = after.has_edge(u, v);
      if (a == b) continue;
      const EdgeChange c{a ? EdgeChange::Op::kAdd : EdgeChange::Op::kRemove, u, v};
      if (!is_monotone(c, truth)) return Edge{u, v};
    }
  }
  return std::nullopt;
}

AdversaryResult simulate_dominating_sbm(const Graph& g, const PartitionLabels& truth,
                                        const Eigen::MatrixXd& target_rates,
                                        const PlantedPartitionParams& base, std::uint64_t seed) {
  const int r = truth.num_communities();
  if (target_rates.rows() != r || target_rates.cols() != r) {
    throw ParameterError("dominating sbm: target rate matrix must be r x r");
  }
  if (!target_rates.isApprox(target_rates.transpose(), 0.0)) {
    throw ParameterError("dominating sbm: target rate matrix must be symmetric");
  }
  if ((target_rates.array() < 0.0).any()) {
    throw ParameterError("dominating sbm: rates must be non-negative");
  }
  const Eigen::MatrixXd base_rates = planted_rate_matrix(r, base.p_tilde, base.q_tilde);
  if (!bm_dominates(target_rates, base_rates)) {
    throw ParameterError(
        "dominating sbm: target must satisfy Q'_ii >= p_tilde and Q'_ij <= q_tilde");
  }
  const int n = g.num_vertices();
  const double scale = std::log(static_cast<double>(n)) / static_cast<double>(n);
  const double p = base.p_tilde * scale;
  const double q = base.q_tilde * scale;
  if (!(p > 0.0 && p < 1.0 && q > 0.0) || (target_rates.array() * scale > 1.0).any()) {
    throw ParameterError("dominating sbm: probabilities must lie in [0, 1]");
  }

  ChangeRecorder rec(g);
  const PairStream stream(seed, Stream::kDominate);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const int i = truth[u];
      const int j = truth[v];
      const double target = target_rates(i, j) * scale;
      const bool present = g.has_edge(u, v);
      if (i == j) {
        if (!present && stream.uniform(u, v) < (target - p) / (1.0 - p)) rec.add(u, v);
      } else if (present && stream.uniform(u, v) < (q - target) / q) {
        rec.remove(u, v);
      }
    }
  }
  return rec.take();
}

AdversaryResult apply_adversary(const Graph& g, const PartitionLabels& truth,
                                const AdversarySpec& spec, std::uint64_t seed) {
  if (g.num_vertices() != truth.num_vertices()) {
    throw ParameterError("adversary: graph and labels disagree on vertex count");
  }
  switch (spec.kind) {
    case AdversaryKind::kNone: return {g, {}};
    case AdversaryKind::kRandomMonotone: return random_monotone(g, truth, spec, seed);
    case AdversaryKind::kSubcommunityPlant: return subcommunity_plant(g, truth, spec, seed);
    case AdversaryKind::kHubPlant: return hub_plant(g, truth, spec, seed);
    case AdversaryKind::kSbmDominate: {
      PlantedPartitionParams base;
      base.n = g.num_vertices();
      base.r = truth.num_communities();
      base.p_tilde = spec.base_p_tilde;
      base.q_tilde = spec.base_q_tilde;
      return simulate_dominating_sbm(g, truth, spec.target_rates, base, seed);
    }
    case AdversaryKind::kScripted: return scripted(g, truth, spec);
  }
  throw ParameterError("adversary: unhandled kind");
}

}  // namespace ppm
