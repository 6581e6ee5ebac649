#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bbsp/split_kernel.hpp"

namespace bbsp {

// Black particle counts, index v-1 holds the count at vertex v.
using Occupancy = std::vector<int>;

inline int total(const Occupancy& x) {
  int t = 0;
  for (int c : x) t += c;
  return t;
}

constexpr std::size_t kDefaultStateCap = 2'000'000;

// Number of ways to put m particles on n vertices (as double, may be huge).
double count_states(int n, int m);

// All occupancies of m particles on n vertices in lexicographically
// descending order, e.g. n=2, m=2: (2,0), (1,1), (0,2).
std::vector<Occupancy> enumerate_states(int n, int m, std::size_t cap = kDefaultStateCap);

// Rank of an occupancy within enumerate_states(n, m) without a lookup table.
class StateIndex {
 public:
  StateIndex(int n, int m);
  std::size_t rank(const Occupancy& x) const;
  std::size_t size() const { return size_; }

 private:
  // ways(k, r) = number of ways to put r particles on k vertices
  std::uint64_t ways(int k, int r) const;
  int n_, m_;
  std::vector<std::uint64_t> table_;
  std::size_t size_;
};

// Reversible measure: weight(x) = prod_v (1/x_v!) prod_{i < x_v} (a i + b).
std::vector<double> stationary_dist(const std::vector<Occupancy>& states, const SplitParam& p);
std::vector<double> log_stationary_weights(const std::vector<Occupancy>& states, const SplitParam& p);

}  // namespace bbsp
