#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace bbsp {

// Vertices are 1-based throughout the public API.
using Vertex = int;

struct Edge {
  Vertex v = 0;  // always v < w
  Vertex w = 0;
  double rate = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  // Validates: n >= 2, endpoints in range, no loops, no duplicates,
  // positive rates, connected. Edges are stored with v < w.
  WeightedGraph(int n, std::vector<Edge> edges);

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }
  double total_rate() const { return total_rate_; }
  // Indices of edges incident to v.
  const std::vector<std::size_t>& incident(Vertex v) const { return incident_[v - 1]; }

  // Same graph with every rate divided by two.
  WeightedGraph halved() const;
  WeightedGraph scaled(double factor) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  double total_rate_ = 0.0;
};

WeightedGraph make_line(int n, double rate = 1.0);
WeightedGraph make_cycle(int n, double rate = 1.0);
WeightedGraph make_complete(int n, double rate = 1.0);

// Text format:
//   n=<N>
//   <v> <w> <rate>      one line per edge, '#' starts a comment
WeightedGraph load_graph(std::istream& in);
WeightedGraph load_graph_file(const std::string& path);
void save_graph(std::ostream& out, const WeightedGraph& g);
void save_graph_file(const std::string& path, const WeightedGraph& g);

}  // namespace bbsp
