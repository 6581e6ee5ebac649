#include "bbsp/mabb.hpp"

#include "bbsp/bbsp_sim.hpp"
#include "bbsp/error.hpp"

namespace bbsp {

double marked_placement_prob(const SplitKernel& kernel, int bv, int bw, int bv_new, bool from_v, bool to_v) {
  int N = bv + bw;
  if (bv_new < 0 || bv_new > N) throw InvalidArgument("bad split outcome");
  // stay probability: (k+1)/(N+1) * P_{N+1}(full config) / P_N(split), k = new
  // non-marked count on the mark's side
  int k_here = from_v ? bv_new : N - bv_new;
  double base = kernel.prob(N, bv_new);
  if (base <= 0.0) throw InvalidArgument("split outcome has zero probability");
  double full = kernel.prob(N + 1, from_v ? bv_new + 1 : bv_new);
  double stay = (k_here + 1.0) / (N + 1.0) * full / base;
  return from_v == to_v ? stay : 1.0 - stay;
}

double marked_stay_prob(const SplitParam& p, int n_edge, int new_count_at_mark) {
  return static_cast<double>(p.colour(new_count_at_mark)) /
         (static_cast<double>(p.a()) * n_edge + 2.0 * p.b());
}

Occupancy mabb_fn(const WeightedGraph& g, const SplitKernel& kernel, double u, std::size_t edge, const Occupancy& x) {
  Occupancy y = x;
  Event ev;
  ev.edge = edge;
  ev.ub = u;
  bbsp_apply(g, kernel, y, ev);
  return y;
}

namespace {
Vertex place_mark(const Edge& e, const SplitParam& p, int n_edge, int new_here, Vertex marked, double u_prime) {
  double stay = marked_stay_prob(p, n_edge, new_here);
  if (u_prime < stay) return marked;
  return marked == e.v ? e.w : e.v;
}
}  // namespace

Vertex mabb_star_fn(const WeightedGraph& g, const SplitKernel& kernel, double u, double u_prime, std::size_t edge,
                    const Occupancy& x, Vertex marked) {
  const Edge& e = g.edge(edge);
  if (marked != e.v && marked != e.w) return marked;
  Occupancy y = mabb_fn(g, kernel, u, edge, x);
  int n_edge = x[static_cast<std::size_t>(e.v - 1)] + x[static_cast<std::size_t>(e.w - 1)];
  return place_mark(e, kernel.param(), n_edge, y[static_cast<std::size_t>(marked - 1)], marked, u_prime);
}

void mabb_apply(const WeightedGraph& g, const SplitKernel& kernel, MarkedState& st, const Event& ev) {
  const Edge& e = g.edge(ev.edge);
  auto iv = static_cast<std::size_t>(e.v - 1), iw = static_cast<std::size_t>(e.w - 1);
  int n_edge = st.nonmarked[iv] + st.nonmarked[iw];
  bbsp_apply(g, kernel, st.nonmarked, ev);
  if (st.marked == e.v || st.marked == e.w) {
    st.marked = place_mark(e, kernel.param(), n_edge, st.nonmarked[static_cast<std::size_t>(st.marked - 1)], st.marked,
                           ev.uc());
  }
}

MarkedTrajectory simulate_mabb(const WeightedGraph& g, const SplitKernel& kernel, const MarkedState& x0, double t_end,
                               EventStream& stream, const std::vector<double>& sample_times,
                               const MarkedObserver& observer) {
  validate_occupancy(g, x0.nonmarked);
  if (x0.marked < 1 || x0.marked > g.num_vertices()) throw InvalidArgument("marked vertex out of range");
  if (total(x0.nonmarked) + 1 > kernel.max_total()) throw InvalidArgument("kernel capacity below particle count");
  MarkedTrajectory tr;
  tr.times = sample_times;
  MarkedState st = x0;
  std::size_t si = 0;
  for (;;) {
    const Event& pk = stream.peek();
    while (si < sample_times.size() && sample_times[si] < pk.time) {
      tr.states.push_back(st);
      ++si;
    }
    if (pk.time > t_end) break;
    Event ev = stream.next();
    mabb_apply(g, kernel, st, ev);
    ++tr.events;
    if (observer) observer(ev, st);
  }
  while (si < sample_times.size()) {
    tr.states.push_back(st);
    ++si;
  }
  tr.final_state = st;
  return tr;
}

std::vector<double> marked_conditional(const SplitParam& p, const Occupancy& x) {
  double denom = static_cast<double>(p.a()) * total(x) + static_cast<double>(p.b()) * static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<double>(p.colour(x[i])) / denom;
  return out;
}

Occupancy with_mark(const MarkedState& st) {
  Occupancy y = st.nonmarked;
  ++y[static_cast<std::size_t>(st.marked - 1)];
  return y;
}

std::uint64_t occupancy_hash(const Occupancy& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int c : x) {
    auto u = static_cast<std::uint32_t>(c);
    for (int i = 0; i < 4; ++i) {
      h ^= (u >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace bbsp
