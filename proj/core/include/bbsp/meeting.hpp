#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"

namespace bbsp {

// Expected meeting times of two independent walks on the halved graph. Each
// walk crosses edge e at rate (r_e/2)/Z with Z = sum r (canonical) or Z = 1
// (raw). They meet when adjacent and the connecting edge rings for either.
struct MeetingTable {
  int n = 0;
  std::vector<double> values;  // row major n x n, zero diagonal
  double at(Vertex i, Vertex j) const { return values[static_cast<std::size_t>(i - 1) * n + (j - 1)]; }
  double max() const;
};

MeetingTable exact_meeting_times(const WeightedGraph& g, TimeScale scale = TimeScale::Canonical);

// 2 * max expected meeting time.
double recommended_round_length(const WeightedGraph& g, TimeScale scale = TimeScale::Canonical);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t replicas = 0;
};

McEstimate mc_meeting_time(const WeightedGraph& g, Vertex i, Vertex j, std::uint64_t seed, std::size_t replicas,
                           TimeScale scale = TimeScale::Canonical, unsigned threads = 0);

// Expected hitting times E_i T_target for the single walk (crossing rate r_e/(2Z)).
std::vector<double> hitting_times_to(const WeightedGraph& g, Vertex target, TimeScale scale = TimeScale::Canonical);

// sum_{i,j} pi_i pi_j E_i T_j for the same walk (pi uniform).
double tau0(const WeightedGraph& g, TimeScale scale = TimeScale::Canonical);

}  // namespace bbsp
