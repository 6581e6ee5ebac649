#pragma once

#include <cstdint>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/rng.hpp"
#include "bbsp/split_kernel.hpp"
#include "bbsp/state_space.hpp"

namespace bbsp {

struct Trajectory {
  std::vector<double> times;        // requested sample times
  std::vector<Occupancy> states;    // state at each sample time
  Occupancy final_state;
  double final_time = 0.0;
  std::uint64_t events = 0;
};

void validate_occupancy(const WeightedGraph& g, const Occupancy& x);

// Redistributes the blacks on the ringing edge.
void bbsp_apply(const WeightedGraph& g, const SplitKernel& kernel, Occupancy& x, const Event& ev);

// Runs events with time <= t_end and records the state at each sample time
// (sorted ascending, all <= t_end).
Trajectory simulate_bbsp(const WeightedGraph& g, const SplitKernel& kernel, const Occupancy& x0, double t_end,
                         EventStream& stream, const std::vector<double>& sample_times = {});

// Conditioned on N particles on an edge and a Beta(s,s) draw p, the number
// that go to the lower endpoint is #{j < N : U_j < p}. Sharing U_j between
// two configurations gives a monotone coupling.
int split_with_shared_uniforms(int N, double p, const std::vector<double>& shared);

// Two line configurations driven by one event sequence through the shared
// uniform split above. Each marginal is the ordinary process.
struct CoupledLine {
  Occupancy lower, upper;
};
void coupled_line_apply(const WeightedGraph& g, const SplitParam& p, CoupledLine& c, const Event& ev);

// NegBin(s, q) pmf ~ Gamma(k+s)/k! (1-q)^k, k >= 0.
double negbin_pmf(double s, double q, int k);

// iid NegBin(s, q) on `coords` coordinates conditioned on their sum being m.
// The conditional law is Dirichlet-multinomial, sampled with a Polya urn.
Occupancy sample_conditioned_negbin(int coords, int m, double s, CounterRng& rng);

// Initial profile: conditioned NegBin on the first floor(n/2) vertices, zero elsewhere.
Occupancy sample_half_profile(int n, int m, double s, CounterRng& rng);

}  // namespace bbsp
