#include <benchmark/benchmark.h>

#include "bbsp/bbsp.hpp"

using namespace bbsp;

namespace {

Occupancy piled(int n, int m) {
  Occupancy x(static_cast<std::size_t>(n), 0);
  x[0] = m;
  return x;
}

void BM_SimulateEvents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
  auto g = make_cycle(n);
  SplitKernel k(SplitParam(1, 1), m);
  std::uint64_t events = 0, rep = 0;
  for (auto _ : state) {
    EventStream s(g, 1, rep++);
    auto tr = simulate_bbsp(g, k, piled(n, m), 1000.0, s);
    events += tr.events;
    benchmark::DoNotOptimize(tr.final_state.data());
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateEvents)->Args({16, 32})->Args({64, 256});

void BM_MarkedEvents(benchmark::State& state) {
  auto g = make_line(16);
  SplitKernel k(SplitParam(2, 3), 33);
  std::uint64_t events = 0, rep = 0;
  for (auto _ : state) {
    EventStream s(g, 2, rep++);
    auto tr = simulate_mabb(g, k, MarkedState{piled(16, 31), 8}, 1000.0, s);
    events += tr.events;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_MarkedEvents);

void BM_ChameleonToAbsorption(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto g = make_line(n);
  SplitParam p(1, 1);
  SplitKernel k(p, n + 1);
  ChameleonConfig cfg;
  cfg.round_length = recommended_round_length(g);
  auto st = init_chameleon(p, piled(n, n - 1), n);
  std::uint64_t events = 0, rep = 0;
  for (auto _ : state) {
    EventStream s(g, 3, rep++);
    auto run = run_chameleon(g, k, st, s, cfg);
    events += run.events;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ChameleonToAbsorption)->Arg(4)->Arg(8);

void BM_ExactMeetingTimes(benchmark::State& state) {
  auto g = make_cycle(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_meeting_times(g).max());
}
BENCHMARK(BM_ExactMeetingTimes)->Arg(16)->Arg(64);

void BM_Uniformization(benchmark::State& state) {
  ExactChain chain(make_line(5), SplitParam(1, 1), static_cast<int>(state.range(0)));
  auto mu = chain.point_mass(piled(5, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(chain.propagate(mu, 20.0).data());
  state.counters["states"] = static_cast<double>(chain.size());
}
BENCHMARK(BM_Uniformization)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
