#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bbsp {

// Number of worker threads; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested) return requested;
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

// Runs body(acc, replica) for replica in [0, count). Replicas are grouped in
// fixed blocks that are merged in block order, so the result does not depend
// on the thread count.
template <class Acc, class Make, class Body, class Merge>
Acc replica_reduce(std::size_t count, Make make, Body body, Merge merge, unsigned threads = 0) {
  constexpr std::size_t kBlock = 256;
  std::size_t nblocks = (count + kBlock - 1) / kBlock;
  std::vector<Acc> partial;
  partial.reserve(nblocks);
  for (std::size_t i = 0; i < nblocks; ++i) partial.push_back(make());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      std::size_t lo = b * kBlock, hi = std::min(count, lo + kBlock);
      for (std::size_t r = lo; r < hi; ++r) body(partial[b], r);
    }
  };
  unsigned nt = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(nblocks, 1)));
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Acc out = make();
  for (auto& p : partial) merge(out, p);
  return out;
}

}  // namespace bbsp
