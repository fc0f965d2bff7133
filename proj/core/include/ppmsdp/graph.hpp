#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ppm {

/// Unordered vertex pair stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Normalizes (a, b) to an Edge with u < v.
Edge make_edge(int a, int b);

/// Undirected simple graph on vertices 0..n-1 with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  /// Validates every pair: in range, no self-loops, no duplicates.
  static Graph from_edges(int n, std::span<const Edge> edges);

  int num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return m_; }

  bool has_edge(int u, int v) const;
  /// Returns false when the edge was already present.
  bool add_edge(int u, int v);
  /// Returns false when the edge was absent.
  bool remove_edge(int u, int v);

  std::span<const int> neighbors(int u) const { return adj_.at(static_cast<std::size_t>(u)); }
  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

  /// Edges in lexicographic (u, v) order.
  std::vector<Edge> edges() const;

  /// Dense symmetric 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_pair(int u, int v) const;

  int n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::vector<int>> adj_;
};

/// Assignment of n vertices to r nonempty communities labelled 0..r-1.
class PartitionLabels {
 public:
  PartitionLabels() = default;
  /// Throws ParameterError on out-of-range labels or empty communities.
  PartitionLabels(std::vector<int> labels, int r);

  /// Contiguous blocks: the first sizes[0] vertices form community 0, and so on.
  static PartitionLabels from_sizes(std::span<const int> sizes);

  int num_vertices() const noexcept { return static_cast<int>(labels_.size()); }
  int num_communities() const noexcept { return r_; }
  int operator[](int v) const { return labels_.at(static_cast<std::size_t>(v)); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::vector<int> members(int community) const;

  bool same_community(int u, int v) const { return (*this)[u] == (*this)[v]; }

  /// Relabels communities by first appearance, so equal partitions compare equal.
  PartitionLabels canonical() const;

  friend bool operator==(const PartitionLabels&, const PartitionLabels&) = default;

 private:
  std::vector<int> labels_;
  std::vector<int> sizes_;
  int r_ = 0;
};

/// True when a and b induce the same partition (labels may be permuted).
bool same_partition(const PartitionLabels& a, const PartitionLabels& b);

/// Edge counts E(v, j) from each vertex into each community (n x r).
Eigen::MatrixXd vertex_community_edges(const Graph& g, const PartitionLabels& truth);

/// Block totals E(i, j) = 1_i^T A 1_j (r x r); diagonal counts ordered pairs.
Eigen::MatrixXd community_edge_totals(const Graph& g, const PartitionLabels& truth);

// Text formats. Graph: header "n m", then m lines "u v" with u < v sorted
// lexicographically. Labels: n lines "vertex community". LF line endings.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
void write_graph(const std::filesystem::path& path, const Graph& g);
Graph read_graph(const std::filesystem::path& path);

void write_labels(std::ostream& out, const PartitionLabels& labels);
/// r is inferred as max label + 1.
PartitionLabels read_labels(std::istream& in);
void write_labels(const std::filesystem::path& path, const PartitionLabels& labels);
PartitionLabels read_labels(const std::filesystem::path& path);

}  // namespace ppm
