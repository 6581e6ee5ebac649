#include "bbsp/event_stream.hpp"

#include <algorithm>

namespace bbsp {

namespace {
enum Lane : std::uint64_t { kTimes = 1, kEdges = 2, kUb = 3, kUc = 4, kCoins = 5 };
}

EventStream::EventStream(const WeightedGraph& g, std::uint64_t seed, std::uint64_t replica, TimeScale scale)
    : seed_(seed),
      replica_(replica),
      times_(derive_key({seed, replica, kTimes})),
      edges_(derive_key({seed, replica, kEdges})),
      ub_(derive_key({seed, replica, kUb})),
      uc_(derive_key({seed, replica, kUc})),
      coins_(derive_key({seed, replica, kCoins})) {
  double acc = 0.0;
  cum_.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    acc += e.rate;
    cum_.push_back(acc);
  }
  rate_ = scale == TimeScale::Canonical ? 1.0 : acc;
}

std::size_t pick_cumulative(const std::vector<double>& cum, double u) {
  double target = u * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) return cum.size() - 1;
  return static_cast<std::size_t>(it - cum.begin());
}

Event EventStream::draw() {
  Event ev;
  t_ += times_.exponential(rate_);
  ev.index = count_++;
  ev.time = t_;
  ev.edge = pick_cumulative(cum_, edges_.uniform());
  ev.ub = ub_.uniform();
  ev.uc_bits = uc_.next();
  return ev;
}

const Event& EventStream::peek() {
  if (!has_peek_) {
    peeked_ = draw();
    has_peek_ = true;
  }
  return peeked_;
}

Event EventStream::next() {
  if (has_peek_) {
    has_peek_ = false;
    return peeked_;
  }
  return draw();
}

}  // namespace bbsp
