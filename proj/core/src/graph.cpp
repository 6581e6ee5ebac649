#include "bbsp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "bbsp/error.hpp"

namespace bbsp {

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 2) throw InvalidArgument("graph needs at least 2 vertices, got " + std::to_string(n_));
  incident_.assign(static_cast<std::size_t>(n_), {});
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge& e = edges_[i];
    if (e.v > e.w) std::swap(e.v, e.w);
    if (e.v < 1 || e.w > n_) {
      throw InvalidArgument("edge {" + std::to_string(e.v) + "," + std::to_string(e.w) +
                            "} out of range 1.." + std::to_string(n_));
    }
    if (e.v == e.w) throw InvalidArgument("self loop at vertex " + std::to_string(e.v));
    if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
      throw NonPositiveWeightError("edge {" + std::to_string(e.v) + "," + std::to_string(e.w) +
                                   "} has non-positive rate");
    }
    if (!seen.insert({e.v, e.w}).second) {
      throw InvalidArgument("duplicate edge {" + std::to_string(e.v) + "," + std::to_string(e.w) + "}");
    }
    incident_[e.v - 1].push_back(i);
    incident_[e.w - 1].push_back(i);
    total_rate_ += e.rate;
  }
  // connectivity by DFS from vertex 1
  std::vector<char> mark(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{1};
  mark[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (std::size_t ei : incident_[x - 1]) {
      int y = edges_[ei].v == x ? edges_[ei].w : edges_[ei].v;
      if (!mark[y - 1]) {
        mark[y - 1] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  if (reached != n_) {
    throw DisconnectedGraphError("graph is disconnected (" + std::to_string(reached) + " of " +
                                 std::to_string(n_) + " vertices reachable from 1)");
  }
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  std::vector<Edge> es = edges_;
  for (auto& e : es) e.rate *= factor;
  return WeightedGraph(n_, std::move(es));
}

WeightedGraph WeightedGraph::halved() const { return scaled(0.5); }

WeightedGraph make_line(int n, double rate) {
  std::vector<Edge> es;
  for (int i = 1; i < n; ++i) es.push_back({i, i + 1, rate});
  return WeightedGraph(n, std::move(es));
}

WeightedGraph make_cycle(int n, double rate) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3");
  std::vector<Edge> es;
  for (int i = 1; i < n; ++i) es.push_back({i, i + 1, rate});
  es.push_back({1, n, rate});
  return WeightedGraph(n, std::move(es));
}

WeightedGraph make_complete(int n, double rate) {
  std::vector<Edge> es;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) es.push_back({i, j, rate});
  return WeightedGraph(n, std::move(es));
}

WeightedGraph load_graph(std::istream& in) {
  std::string line;
  int n = -1;
  int lineno = 0;
  std::vector<Edge> es;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (n < 0) {
      if (first.rfind("n=", 0) != 0) throw ParseError("line " + std::to_string(lineno) + ": expected 'n=<N>' header");
      try {
        std::size_t pos = 0;
        n = std::stoi(first.substr(2), &pos);
        if (pos != first.size() - 2) throw ParseError("bad header");
      } catch (const std::logic_error&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad vertex count '" + first + "'");
      }
      std::string extra;
      if (ls >> extra) throw ParseError("line " + std::to_string(lineno) + ": trailing text after header");
      continue;
    }
    Edge e;
    std::string ws, rs, extra;
    if (!(ls >> ws >> rs) || (ls >> extra)) {
      throw ParseError("line " + std::to_string(lineno) + ": expected '<v> <w> <rate>'");
    }
    try {
      std::size_t p1 = 0, p2 = 0, p3 = 0;
      e.v = std::stoi(first, &p1);
      e.w = std::stoi(ws, &p2);
      e.rate = std::stod(rs, &p3);
      if (p1 != first.size() || p2 != ws.size() || p3 != rs.size()) throw std::invalid_argument("junk");
    } catch (const std::logic_error&) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed edge");
    }
    es.push_back(e);
  }
  if (n < 0) throw ParseError("missing 'n=<N>' header");
  return WeightedGraph(n, std::move(es));
}

WeightedGraph load_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open graph file '" + path + "'");
  return load_graph(f);
}

void save_graph(std::ostream& out, const WeightedGraph& g) {
  out << "n=" << g.num_vertices() << "\n";
  char buf[64];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.rate);
    out << e.v << " " << e.w << " " << buf << "\n";
  }
}

void save_graph_file(const std::string& path, const WeightedGraph& g) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write graph file '" + path + "'");
  save_graph(f, g);
}

}  // namespace bbsp
