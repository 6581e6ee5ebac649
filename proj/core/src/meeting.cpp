#include "bbsp/meeting.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

#include "bbsp/error.hpp"
#include "bbsp/parallel.hpp"
#include "bbsp/rng.hpp"

namespace bbsp {

namespace {

constexpr std::size_t kDirectLimit = 10'000;

double time_norm(const WeightedGraph& g, TimeScale scale) {
  return scale == TimeScale::Canonical ? g.total_rate() : 1.0;
}

// Solves A h = 1 for a symmetric positive definite A.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(A.rows());
  if (static_cast<std::size_t>(A.rows()) <= kDirectLimit) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw Error("sparse factorisation failed");
    return ldlt.solve(rhs);
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A);
  cg.setTolerance(1e-13);
  cg.setMaxIterations(static_cast<Eigen::Index>(20 * A.rows()));
  Eigen::VectorXd h = cg.solve(rhs);
  if (cg.info() != Eigen::Success) throw Error("conjugate gradient did not converge");
  return h;
}

}  // namespace

double MeetingTable::max() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

MeetingTable exact_meeting_times(const WeightedGraph& g, TimeScale scale) {
  const int n = g.num_vertices();
  const double z = time_norm(g, scale);
  // unknowns: ordered pairs (i, j), i != j
  auto id = [n](int i, int j) { return static_cast<Eigen::Index>((i - 1) * (n - 1) + (j < i ? j - 1 : j - 2)); };
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * (n - 1);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      Eigen::Index row = id(i, j);
      double diag = 0.0;
      // either walk can move; the first walk sits at i, the second at j
      for (int walker = 0; walker < 2; ++walker) {
        int here = walker == 0 ? i : j, other = walker == 0 ? j : i;
        for (std::size_t ei : g.incident(here)) {
          const Edge& e = g.edge(ei);
          double q = 0.5 * e.rate / z;
          diag += q;
          int to = e.v == here ? e.w : e.v;
          if (to == other) continue;  // meeting: absorbed
          Eigen::Index col = walker == 0 ? id(to, j) : id(i, to);
          trip.emplace_back(row, col, -q);
        }
      }
      trip.emplace_back(row, row, diag);
    }
  }
  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd h = solve_spd(A);
  MeetingTable t;
  t.n = n;
  t.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) t.values[static_cast<std::size_t>(i - 1) * n + (j - 1)] = h(id(i, j));
  return t;
}

double recommended_round_length(const WeightedGraph& g, TimeScale scale) {
  return 2.0 * exact_meeting_times(g, scale).max();
}

McEstimate mc_meeting_time(const WeightedGraph& g, Vertex i, Vertex j, std::uint64_t seed, std::size_t replicas,
                           TimeScale scale, unsigned threads) {
  if (i < 1 || j < 1 || i > g.num_vertices() || j > g.num_vertices()) throw InvalidArgument("vertex out of range");
  if (replicas < 2) throw InvalidArgument("need at least 2 replicas");
  const double z = time_norm(g, scale);
  // all clocks of both walks together ring at rate sum r / z
  const double rate = g.total_rate() / z;
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& e : g.edges()) cum.push_back(acc += e.rate);
  struct Acc {
    double s = 0.0, s2 = 0.0;
  };
  Acc res = replica_reduce<Acc>(
      replicas, [] { return Acc{}; },
      [&](Acc& a, std::size_t r) {
        CounterRng rng(derive_key({seed, r, 0x3ee7}));
        int x = i, y = j;
        double t = 0.0;
        while (x != y) {
          t += rng.exponential(rate);
          bool first = rng.uniform() < 0.5;
          auto ei = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), rng.uniform() * acc) - cum.begin());
          ei = std::min(ei, cum.size() - 1);
          const Edge& e = g.edge(ei);
          int& me = first ? x : y;
          int other = first ? y : x;
          if (me != e.v && me != e.w) continue;
          int to = me == e.v ? e.w : e.v;
          if (to == other) break;
          me = to;
        }
        a.s += t;
        a.s2 += t * t;
      },
      [](Acc& out, const Acc& in) {
        out.s += in.s;
        out.s2 += in.s2;
      },
      threads);
  McEstimate est;
  est.replicas = replicas;
  double rn = static_cast<double>(replicas);
  est.mean = res.s / rn;
  double var = std::max(0.0, (res.s2 - rn * est.mean * est.mean) / (rn - 1.0));
  est.stderr_ = std::sqrt(var / rn);
  return est;
}

std::vector<double> hitting_times_to(const WeightedGraph& g, Vertex target, TimeScale scale) {
  const int n = g.num_vertices();
  if (target < 1 || target > n) throw InvalidArgument("target out of range");
  const double z = time_norm(g, scale);
  auto id = [target](int i) { return static_cast<Eigen::Index>(i < target ? i - 1 : i - 2); };
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 1; i <= n; ++i) {
    if (i == target) continue;
    double diag = 0.0;
    for (std::size_t ei : g.incident(i)) {
      const Edge& e = g.edge(ei);
      double q = 0.5 * e.rate / z;
      diag += q;
      int to = e.v == i ? e.w : e.v;
      if (to != target) trip.emplace_back(id(i), id(to), -q);
    }
    trip.emplace_back(id(i), id(i), diag);
  }
  Eigen::SparseMatrix<double> A(n - 1, n - 1);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd h = solve_spd(A);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i <= n; ++i)
    if (i != target) out[static_cast<std::size_t>(i - 1)] = h(id(i));
  return out;
}

double tau0(const WeightedGraph& g, TimeScale scale) {
  const int n = g.num_vertices();
  double s = 0.0;
  for (int j = 1; j <= n; ++j)
    for (double h : hitting_times_to(g, j, scale)) s += h;
  return s / (static_cast<double>(n) * n);
}

}  // namespace bbsp
