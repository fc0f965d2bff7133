#include "ppmsdp/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ppmsdp/error.hpp"

namespace ppm {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Graph::Graph(int n) : n_(n), adj_(static_cast<std::size_t>(n)) {
  if (n < 0) throw ParameterError("graph: negative vertex count");
}

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) {
    if (!g.add_edge(e.u, e.v)) {
      throw ParameterError("graph: duplicate edge " + std::to_string(e.u) + " " +
                           std::to_string(e.v));
    }
  }
  return g;
}

void Graph::check_pair(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw ParameterError("graph: vertex out of range (" + std::to_string(u) + ", " +
                         std::to_string(v) + ") for n=" + std::to_string(n_));
  }
  if (u == v) throw ParameterError("graph: self-loop at " + std::to_string(u));
}

bool Graph::has_edge(int u, int v) const {
  check_pair(u, v);
  const auto& nb = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::add_edge(int u, int v) {
  check_pair(u, v);
  auto& nu = adj_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it != nu.end() && *it == v) return false;
  nu.insert(it, v);
  auto& nv = adj_[static_cast<std::size_t>(v)];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++m_;
  return true;
}

bool Graph::remove_edge(int u, int v) {
  check_pair(u, v);
  auto& nu = adj_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it == nu.end() || *it != v) return false;
  nu.erase(it);
  auto& nv = adj_[static_cast<std::size_t>(v)];
  nv.erase(std::lower_bound(nv.begin(), nv.end(), u));
  --m_;
  return true;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (int u = 0; u < n_; ++u) {
    for (int v : adj_[static_cast<std::size_t>(u)]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (int u = 0; u < n_; ++u) {
    for (int v : adj_[static_cast<std::size_t>(u)]) a(u, v) = 1.0;
  }
  return a;
}

PartitionLabels::PartitionLabels(std::vector<int> labels, int r)
    : labels_(std::move(labels)), sizes_(static_cast<std::size_t>(std::max(r, 0)), 0), r_(r) {
  if (r < 1) throw ParameterError("labels: community count must be >= 1");
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    const int c = labels_[v];
    if (c < 0 || c >= r) {
      throw ParameterError("labels: vertex " + std::to_string(v) + " has community " +
                           std::to_string(c) + " outside [0, " + std::to_string(r) + ")");
    }
    ++sizes_[static_cast<std::size_t>(c)];
  }
  for (int i = 0; i < r; ++i) {
    if (sizes_[static_cast<std::size_t>(i)] == 0) {
      throw ParameterError("labels: community " + std::to_string(i) + " is empty");
    }
  }
}

PartitionLabels PartitionLabels::from_sizes(std::span<const int> sizes) {
  std::vector<int> labels;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ParameterError("labels: community sizes must be positive");
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[i]), static_cast<int>(i));
  }
  return PartitionLabels(std::move(labels), static_cast<int>(sizes.size()));
}

std::vector<int> PartitionLabels::members(int community) const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v) {
    if (labels_[static_cast<std::size_t>(v)] == community) out.push_back(v);
  }
  return out;
}

PartitionLabels PartitionLabels::canonical() const {
  std::vector<int> map(static_cast<std::size_t>(r_), -1);
  std::vector<int> out(labels_.size());
  int next = 0;
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    int& m = map[static_cast<std::size_t>(labels_[v])];
    if (m < 0) m = next++;
    out[v] = m;
  }
  return PartitionLabels(std::move(out), r_);
}

bool same_partition(const PartitionLabels& a, const PartitionLabels& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_communities() != b.num_communities()) {
    return false;
  }
  return a.canonical().labels() == b.canonical().labels();
}

Eigen::MatrixXd vertex_community_edges(const Graph& g, const PartitionLabels& truth) {
  if (g.num_vertices() != truth.num_vertices()) {
    throw ParameterError("graph and labels disagree on vertex count");
  }
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(g.num_vertices(), truth.num_communities());
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (int w : g.neighbors(v)) e(v, truth[w]) += 1.0;
  }
  return e;
}

Eigen::MatrixXd community_edge_totals(const Graph& g, const PartitionLabels& truth) {
  const Eigen::MatrixXd e = vertex_community_edges(g, truth);
  const int r = truth.num_communities();
  Eigen::MatrixXd totals = Eigen::MatrixXd::Zero(r, r);
  for (int v = 0; v < g.num_vertices(); ++v) totals.row(truth[v]) += e.row(v);
  return totals;
}

// ---------------------------------------------------------------------------
// I/O

namespace {

// Reads one line, requiring LF endings. Returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  if (!std::getline(in, line)) return false;
  ++lineno;
  if (!line.empty() && line.back() == '\r') throw ParseError("CR line ending", lineno);
  return true;
}

// Parses exactly two non-negative integers from a line.
std::pair<long long, long long> parse_pair(const std::string& line, std::size_t lineno) {
  std::istringstream ss(line);
  long long a = 0;
  long long b = 0;
  std::string rest;
  if (!(ss >> a >> b) || (ss >> rest)) {
    throw ParseError("expected two integers, got \"" + line + "\"", lineno);
  }
  if (a < 0 || b < 0) throw ParseError("negative value", lineno);
  return {a, b};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw ParseError("missing header", 1);
  const auto [n, m] = parse_pair(line, lineno);
  if (n > (1LL << 30)) throw ParseError("vertex count too large", lineno);
  Graph g(static_cast<int>(n));
  Edge prev{-1, -1};
  for (long long k = 0; k < m; ++k) {
    if (!next_line(in, line, lineno)) {
      throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(k),
                       lineno + 1);
    }
    const auto [u, v] = parse_pair(line, lineno);
    if (u >= n || v >= n) throw ParseError("vertex out of range", lineno);
    if (u >= v) throw ParseError("edge must satisfy u < v", lineno);
    const Edge e{static_cast<int>(u), static_cast<int>(v)};
    if (e == prev) throw ParseError("duplicate edge", lineno);
    if (e < prev) throw ParseError("edges not sorted", lineno);
    g.add_edge(e.u, e.v);
    prev = e;
  }
  while (next_line(in, line, lineno)) {
    if (!line.empty()) throw ParseError("trailing content after edge list", lineno);
  }
  return g;
}

void write_graph(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  write_graph(out, g);
}

Graph read_graph(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_graph(in);
}

void write_labels(std::ostream& out, const PartitionLabels& labels) {
  for (int v = 0; v < labels.num_vertices(); ++v) out << v << ' ' << labels[v] << '\n';
}

PartitionLabels read_labels(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<int> labels;
  int r = 0;
  while (next_line(in, line, lineno)) {
    if (line.empty()) continue;
    const auto [v, c] = parse_pair(line, lineno);
    if (v != static_cast<long long>(labels.size())) {
      throw ParseError("expected vertex " + std::to_string(labels.size()), lineno);
    }
    if (c > (1 << 20)) throw ParseError("community index too large", lineno);
    labels.push_back(static_cast<int>(c));
    r = std::max(r, static_cast<int>(c) + 1);
  }
  if (labels.empty()) throw ParseError("no labels", std::max<std::size_t>(lineno, 1));
  try {
    return PartitionLabels(std::move(labels), r);
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), lineno);
  }
}

void write_labels(const std::filesystem::path& path, const PartitionLabels& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
}

PartitionLabels read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

}  // namespace ppm
