#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/split_kernel.hpp"
#include "bbsp/state_space.hpp"

namespace bbsp {

struct MarkedState {
  Occupancy nonmarked;  // m - 1 particles
  Vertex marked = 1;
  friend bool operator==(const MarkedState&, const MarkedState&) = default;
};

// Probability that the marked particle, currently at `from` (an endpoint of
// the ringing edge), ends at `to`, when the non-marked counts on the edge go
// from (bv, bw) to (bv_new, bw_new). `from`/`to` are true for the lower endpoint v.
// Computed from the ratio of split probabilities with and without the mark.
double marked_placement_prob(const SplitKernel& kernel, int bv, int bw, int bv_new, bool from_v, bool to_v);

// Closed form of the same: P(stay at x) = chi(B'(x)) / (a N + 2b), N = bv + bw.
double marked_stay_prob(const SplitParam& p, int n_edge, int new_count_at_mark);

// Non-marked update (the plain split driven by u).
Occupancy mabb_fn(const WeightedGraph& g, const SplitKernel& kernel, double u, std::size_t edge, const Occupancy& x);

// New location of the mark given u, u' and the edge.
Vertex mabb_star_fn(const WeightedGraph& g, const SplitKernel& kernel, double u, double u_prime, std::size_t edge,
                    const Occupancy& x, Vertex marked);

// In place event update of a marked state.
void mabb_apply(const WeightedGraph& g, const SplitKernel& kernel, MarkedState& st, const Event& ev);

struct MarkedTrajectory {
  std::vector<double> times;
  std::vector<MarkedState> states;
  MarkedState final_state;
  std::uint64_t events = 0;
};

using MarkedObserver = std::function<void(const Event&, const MarkedState&)>;

MarkedTrajectory simulate_mabb(const WeightedGraph& g, const SplitKernel& kernel, const MarkedState& x0, double t_end,
                               EventStream& stream, const std::vector<double>& sample_times = {},
                               const MarkedObserver& observer = {});

// Conditional law of the mark given the non-marked configuration:
// pi_x(v) = chi(x_v) / (a(m-1) + b n).
std::vector<double> marked_conditional(const SplitParam& p, const Occupancy& x);

// Full configuration (mark counted) of a marked state.
Occupancy with_mark(const MarkedState& st);

// Stable 64 bit hash of an occupancy, for compact logs.
std::uint64_t occupancy_hash(const Occupancy& x);

}  // namespace bbsp
