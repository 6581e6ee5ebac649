#include "bbsp/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bbsp/error.hpp"

namespace bbsp {

double count_states(int n, int m) {
  // C(m+n-1, n-1)
  return std::round(std::exp(std::lgamma(m + n) - std::lgamma(n) - std::lgamma(m + 1)));
}

std::vector<Occupancy> enumerate_states(int n, int m, std::size_t cap) {
  if (n < 1 || m < 0) throw InvalidArgument("enumerate_states needs n >= 1, m >= 0");
  double cnt = count_states(n, m);
  if (cnt > static_cast<double>(cap)) {
    throw StateSpaceTooLarge("state space of " + std::to_string(m) + " particles on " + std::to_string(n) +
                             " vertices has ~" + std::to_string(static_cast<long long>(cnt)) +
                             " states, above the cap " + std::to_string(cap));
  }
  std::vector<Occupancy> out;
  out.reserve(static_cast<std::size_t>(cnt));
  Occupancy cur(static_cast<std::size_t>(n), 0);
  // odometer over descending lex order
  cur[0] = m;
  while (true) {
    out.push_back(cur);
    // find rightmost position i < n-1 with cur[i] > 0, move one unit right and
    // gather everything after it into position i+1
    int i = n - 2;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    int tail = 0;
    for (int j = i + 1; j < n; ++j) {
      tail += cur[static_cast<std::size_t>(j)];
      cur[static_cast<std::size_t>(j)] = 0;
    }
    cur[static_cast<std::size_t>(i)] -= 1;
    cur[static_cast<std::size_t>(i) + 1] = tail + 1;
  }
  return out;
}

StateIndex::StateIndex(int n, int m) : n_(n), m_(m) {
  table_.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(m + 1), 0);
  const std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max() / 2;
  for (int k = 0; k <= n; ++k) {
    for (int r = 0; r <= m; ++r) {
      std::uint64_t v;
      if (k == 0) v = r == 0 ? 1 : 0;
      else if (r == 0) v = 1;
      else v = std::min(kMax, table_[static_cast<std::size_t>(k - 1) * (m + 1) + r] +
                                  table_[static_cast<std::size_t>(k) * (m + 1) + r - 1]);
      table_[static_cast<std::size_t>(k) * (m + 1) + r] = v;
    }
  }
  size_ = static_cast<std::size_t>(ways(n, m));
}

std::uint64_t StateIndex::ways(int k, int r) const {
  return table_[static_cast<std::size_t>(k) * (m_ + 1) + static_cast<std::size_t>(r)];
}

std::size_t StateIndex::rank(const Occupancy& x) const {
  std::size_t idx = 0;
  int rem = m_;
  for (int i = 0; i + 1 < n_; ++i) {
    int c = x[static_cast<std::size_t>(i)];
    int k = n_ - i - 1;  // positions after i
    // states with a larger value at i: sum over c' > c of ways(k, rem - c')
    // = ways(k + 1, rem - c - 1)
    if (c < rem) idx += static_cast<std::size_t>(ways(k + 1, rem - c - 1));
    rem -= c;
  }
  return idx;
}

std::vector<double> log_stationary_weights(const std::vector<Occupancy>& states, const SplitParam& p) {
  int maxc = 0;
  for (const auto& x : states)
    for (int c : x) maxc = std::max(maxc, c);
  std::vector<double> lw(static_cast<std::size_t>(maxc) + 1, 0.0);
  for (int c = 1; c <= maxc; ++c) {
    lw[static_cast<std::size_t>(c)] =
        lw[static_cast<std::size_t>(c) - 1] + std::log(static_cast<double>(p.colour(c - 1))) - std::log(static_cast<double>(c));
  }
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    double s = 0.0;
    for (int c : states[i]) s += lw[static_cast<std::size_t>(c)];
    out[i] = s;
  }
  return out;
}

std::vector<double> stationary_dist(const std::vector<Occupancy>& states, const SplitParam& p) {
  auto lw = log_stationary_weights(states, p);
  double mx = *std::max_element(lw.begin(), lw.end());
  double tot = 0.0;
  std::vector<double> out(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    out[i] = std::exp(lw[i] - mx);
    tot += out[i];
  }
  for (auto& v : out) v /= tot;
  return out;
}

}  // namespace bbsp
