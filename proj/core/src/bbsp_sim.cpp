#include "bbsp/bbsp_sim.hpp"

#include <algorithm>
#include <cmath>

#include "bbsp/error.hpp"

namespace bbsp {

void validate_occupancy(const WeightedGraph& g, const Occupancy& x) {
  if (static_cast<int>(x.size()) != g.num_vertices()) {
    throw InvalidArgument("occupancy has " + std::to_string(x.size()) + " entries, graph has " +
                          std::to_string(g.num_vertices()) + " vertices");
  }
  for (int c : x)
    if (c < 0) throw InvalidArgument("negative occupancy");
}

void bbsp_apply(const WeightedGraph& g, const SplitKernel& kernel, Occupancy& x, const Event& ev) {
  const Edge& e = g.edge(ev.edge);
  int& bv = x[static_cast<std::size_t>(e.v - 1)];
  int& bw = x[static_cast<std::size_t>(e.w - 1)];
  int N = bv + bw;
  int k = kernel.sample(N, ev.ub);
  bv = k;
  bw = N - k;
}

Trajectory simulate_bbsp(const WeightedGraph& g, const SplitKernel& kernel, const Occupancy& x0, double t_end,
                         EventStream& stream, const std::vector<double>& sample_times) {
  validate_occupancy(g, x0);
  if (total(x0) > kernel.max_total()) throw InvalidArgument("kernel capacity below particle count");
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) throw InvalidArgument("sample times must be sorted");
  Trajectory tr;
  tr.times = sample_times;
  Occupancy x = x0;
  std::size_t si = 0;
  for (;;) {
    const Event& ev = stream.peek();
    while (si < sample_times.size() && sample_times[si] < ev.time) {
      tr.states.push_back(x);
      ++si;
    }
    if (ev.time > t_end) break;
    bbsp_apply(g, kernel, x, stream.next());
    ++tr.events;
  }
  while (si < sample_times.size()) {
    tr.states.push_back(x);
    ++si;
  }
  tr.final_state = std::move(x);
  tr.final_time = t_end;
  return tr;
}

int split_with_shared_uniforms(int N, double p, const std::vector<double>& shared) {
  if (static_cast<int>(shared.size()) < N) throw InvalidArgument("not enough shared uniforms");
  int k = 0;
  for (int j = 0; j < N; ++j)
    if (shared[static_cast<std::size_t>(j)] < p) ++k;
  return k;
}

void coupled_line_apply(const WeightedGraph& g, const SplitParam& p, CoupledLine& c, const Event& ev) {
  const Edge& e = g.edge(ev.edge);
  auto iv = static_cast<std::size_t>(e.v - 1), iw = static_cast<std::size_t>(e.w - 1);
  int n1 = c.lower[iv] + c.lower[iw];
  int n2 = c.upper[iv] + c.upper[iw];
  double q = beta_quantile(p.s(), ev.ub);
  CounterRng r(derive_key({ev.uc_bits, 0x11}));
  std::vector<double> u(static_cast<std::size_t>(std::max(n1, n2)));
  for (auto& x : u) x = r.uniform();
  int k1 = split_with_shared_uniforms(n1, q, u);
  int k2 = split_with_shared_uniforms(n2, q, u);
  c.lower[iv] = k1;
  c.lower[iw] = n1 - k1;
  c.upper[iv] = k2;
  c.upper[iw] = n2 - k2;
}

double negbin_pmf(double s, double q, int k) {
  if (k < 0) return 0.0;
  return std::exp(std::lgamma(k + s) - std::lgamma(s) - std::lgamma(k + 1.0) + s * std::log(q) + k * std::log1p(-q));
}

Occupancy sample_conditioned_negbin(int coords, int m, double s, CounterRng& rng) {
  if (coords < 1) throw InvalidArgument("need at least one coordinate");
  Occupancy x(static_cast<std::size_t>(coords), 0);
  for (int added = 0; added < m; ++added) {
    // next ball goes to v with probability (s + x_v) / (coords*s + added)
    double u = rng.uniform() * (coords * s + added);
    double acc = 0.0;
    int pick = coords - 1;
    for (int v = 0; v < coords; ++v) {
      acc += s + x[static_cast<std::size_t>(v)];
      if (u < acc) {
        pick = v;
        break;
      }
    }
    ++x[static_cast<std::size_t>(pick)];
  }
  return x;
}

Occupancy sample_half_profile(int n, int m, double s, CounterRng& rng) {
  int h = n / 2;
  if (h < 1) throw InvalidArgument("half profile needs n >= 2");
  Occupancy part = sample_conditioned_negbin(h, m, s, rng);
  Occupancy x(static_cast<std::size_t>(n), 0);
  std::copy(part.begin(), part.end(), x.begin());
  return x;
}

}  // namespace bbsp
