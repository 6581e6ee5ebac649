#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bbsp/graph.hpp"
#include "bbsp/rng.hpp"

namespace bbsp {

// Canonical: total ring rate 1, edge e picked with probability r_e / sum r.
// Raw: edge e rings at its own rate r_e.
enum class TimeScale { Canonical, Raw };

struct Event {
  std::uint64_t index = 0;
  double time = 0.0;
  std::size_t edge = 0;
  double ub = 0.0;            // drives the black particle split
  std::uint64_t uc_bits = 0;  // drives the marked particle and the colours
  double uc() const { return bits_to_unit(uc_bits); }
};

// The shared source of randomness for one replica. Every process (plain,
// marked, coloured) driven by streams with equal (seed, replica) sees the same
// event sequence, which is what couples them.
class EventStream {
 public:
  EventStream(const WeightedGraph& g, std::uint64_t seed, std::uint64_t replica = 0,
              TimeScale scale = TimeScale::Canonical);

  Event next();
  // Peek without consuming.
  const Event& peek();
  double total_rate() const { return rate_; }
  // Fair coin used at the end of round i (i >= 1).
  bool round_coin(std::uint64_t i) const { return coins_.at(i) & 1ULL; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

 private:
  Event draw();

  std::vector<double> cum_;
  double rate_ = 1.0;
  std::uint64_t seed_, replica_;
  CounterRng times_, edges_, ub_, uc_, coins_;
  double t_ = 0.0;
  std::uint64_t count_ = 0;
  bool has_peek_ = false;
  Event peeked_;
};

// Selects an edge index from cumulative rates with a uniform in [0, 1).
std::size_t pick_cumulative(const std::vector<double>& cum, double u);

}  // namespace bbsp
