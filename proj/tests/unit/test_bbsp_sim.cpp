#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bbsp/analysis.hpp"
#include "bbsp/bbsp_sim.hpp"
#include "bbsp/error.hpp"
#include "bbsp/parallel.hpp"

using namespace bbsp;

TEST(EventStream, Reproducible) {
  auto g = make_cycle(5, 1.0);
  EventStream a(g, 42, 3), b(g, 42, 3), c(g, 42, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    Event x = a.next(), y = b.next(), z = c.next();
    EXPECT_EQ(x.time, y.time);
    EXPECT_EQ(x.edge, y.edge);
    EXPECT_EQ(x.ub, y.ub);
    EXPECT_EQ(x.uc_bits, y.uc_bits);
    differs |= x.time != z.time;
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.round_coin(5), b.round_coin(5));
}

TEST(EventStream, PeekDoesNotConsume) {
  auto g = make_line(3);
  EventStream a(g, 1), b(g, 1);
  double t = a.peek().time;
  EXPECT_EQ(a.peek().time, t);
  EXPECT_EQ(a.next().time, b.next().time);
  EXPECT_NE(a.next().time, t);
}

TEST(EventStream, RatesAndEdgeChoice) {
  WeightedGraph g(3, {{1, 2, 1.0}, {2, 3, 3.0}});
  for (auto scale : {TimeScale::Canonical, TimeScale::Raw}) {
    EventStream s(g, 9, 0, scale);
    const int n = 200000;
    int on_second = 0;
    Event last;
    for (int i = 0; i < n; ++i) {
      last = s.next();
      on_second += last.edge == 1;
    }
    double rate = scale == TimeScale::Canonical ? 1.0 : 4.0;
    double mean_gap = last.time / n;
    EXPECT_NEAR(mean_gap, 1.0 / rate, 4.0 / rate / std::sqrt(n));
    double p = 0.75;
    EXPECT_NEAR(on_second / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(Simulate, ConservesAndIsDeterministic) {
  auto g = make_cycle(6);
  SplitKernel k(SplitParam(2, 3), 20);
  Occupancy x0{20, 0, 0, 0, 0, 0};
  EventStream s1(g, 5), s2(g, 5);
  auto t1 = simulate_bbsp(g, k, x0, 50.0, s1, {1.0, 10.0, 50.0});
  auto t2 = simulate_bbsp(g, k, x0, 50.0, s2, {1.0, 10.0, 50.0});
  ASSERT_EQ(t1.states.size(), 3u);
  for (const auto& x : t1.states) EXPECT_EQ(total(x), 20);
  EXPECT_EQ(t1.states, t2.states);
  EXPECT_EQ(t1.final_state, t1.states.back());
  EXPECT_GT(t1.events, 0u);
}

TEST(Simulate, RejectsBadInput) {
  auto g = make_line(3);
  SplitKernel k(SplitParam(1, 1), 3);
  EventStream s(g, 1);
  EXPECT_THROW(simulate_bbsp(g, k, {1, 1}, 1.0, s), InvalidArgument);
  EXPECT_THROW(simulate_bbsp(g, k, {1, -1, 1}, 1.0, s), InvalidArgument);
  EXPECT_THROW(simulate_bbsp(g, k, {4, 0, 0}, 1.0, s), InvalidArgument);
}

// Law at time t from simulation vs the exact heat kernel.
TEST(Simulate, MatchesExactLaw) {
  auto g = make_line(3);
  SplitParam p(1, 1);
  const int m = 3;
  ExactChain chain(g, p, m);
  SplitKernel k(p, m);
  Occupancy x0{3, 0, 0};
  const double t = 1.5;
  auto exact = chain.propagate(chain.point_mass(x0), t, 1e-12);
  const std::size_t R = 100000;
  std::vector<double> cnt(chain.size(), 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    EventStream s(g, 11, r);
    auto tr = simulate_bbsp(g, k, x0, t, s, {t});
    cnt[chain.index().rank(tr.states[0])] += 1;
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    double q = exact[i];
    EXPECT_NEAR(cnt[i] / R, q, 4 * std::sqrt(q * (1 - q) / R) + 1e-12);
  }
}

// Started from stationarity, the empirical flux x -> y matches y -> x.
TEST(Simulate, StationaryFluxIsReversible) {
  auto g = make_line(3);
  SplitParam p(2, 1);
  const int m = 2;
  ExactChain chain(g, p, m);
  SplitKernel k(p, m);
  const std::size_t S = chain.size();
  std::vector<double> cum;
  double acc = 0.0;
  for (double q : chain.stationary()) cum.push_back(acc += q);
  std::vector<double> flux(S * S, 0.0);
  const std::size_t R = 20000;
  const double horizon = 5.0;
  for (std::size_t r = 0; r < R; ++r) {
    CounterRng pick(derive_key({77, r}));
    std::size_t i0 = pick_cumulative(cum, pick.uniform());
    Occupancy x = chain.states()[i0];
    EventStream s(g, 78, r);
    for (;;) {
      Event ev = s.next();
      if (ev.time > horizon) break;
      std::size_t a = chain.index().rank(x);
      bbsp_apply(g, k, x, ev);
      std::size_t b = chain.index().rank(x);
      if (a != b) flux[a * S + b] += 1;
    }
  }
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = a + 1; b < S; ++b) {
      double f1 = flux[a * S + b], f2 = flux[b * S + a];
      EXPECT_LE(std::abs(f1 - f2), 4 * std::sqrt(f1 + f2) + 1e-9) << a << "->" << b;
    }
}

TEST(UnrestrictedLine, CouplingIsMonotone) {
  auto g = make_line(6);
  SplitParam p(2, 3);
  CoupledLine c{{1, 0, 2, 0, 0, 1}, {3, 1, 2, 0, 4, 1}};
  EventStream s(g, 3);
  for (int i = 0; i < 20000; ++i) {
    coupled_line_apply(g, p, c, s.next());
    for (std::size_t v = 0; v < 6; ++v) ASSERT_LE(c.lower[v], c.upper[v]);
  }
  EXPECT_EQ(total(c.lower), 4);
  EXPECT_EQ(total(c.upper), 11);
}

TEST(UnrestrictedLine, MarginalIsBetaBinomial) {
  // one edge, N particles: the mixed binomial split has the BetaBin law
  auto g = make_line(2);
  SplitParam p(2, 1);
  const int N = 4;
  auto pmf = betabin_pmf(N, p.s());
  std::vector<double> cnt(N + 1, 0);
  EventStream s(g, 21);
  const int R = 200000;
  for (int i = 0; i < R; ++i) {
    CoupledLine c{{N, 0}, {N, 0}};
    coupled_line_apply(g, p, c, s.next());
    cnt[c.lower[0]] += 1;
  }
  for (int k = 0; k <= N; ++k) EXPECT_NEAR(cnt[k] / R, pmf[k], 4 * std::sqrt(pmf[k] * (1 - pmf[k]) / R));
}

TEST(NegBin, ConditionedUrnMatchesExactLaw) {
  // conditioned iid NegBin(s, q): P(x) ~ prod Gamma(x_i + s)/x_i!, independent of q
  const int coords = 3, m = 4;
  const double s = 0.5;
  auto states = enumerate_states(coords, m);
  std::vector<double> w;
  double tot = 0.0;
  for (const auto& x : states) {
    double lw = 0.0;
    for (int c : x) lw += std::log(negbin_pmf(s, 0.3, c));
    w.push_back(std::exp(lw));
    tot += w.back();
  }
  StateIndex idx(coords, m);
  CounterRng rng(derive_key({5}));
  const int R = 200000;
  std::vector<double> cnt(states.size(), 0);
  for (int i = 0; i < R; ++i) cnt[idx.rank(sample_conditioned_negbin(coords, m, s, rng))] += 1;
  for (std::size_t i = 0; i < states.size(); ++i) {
    double q = w[i] / tot;
    EXPECT_NEAR(cnt[i] / R, q, 4 * std::sqrt(q * (1 - q) / R));
  }
  Occupancy half = sample_half_profile(5, 7, s, rng);
  EXPECT_EQ(total(half), 7);
  EXPECT_EQ(half[2] + half[3] + half[4], 0);
}

TEST(NegBin, PmfSumsToOne) {
  double sum = 0.0;
  for (int k = 0; k < 2000; ++k) sum += negbin_pmf(1.5, 0.2, k);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Parallel, ReductionIndependentOfThreads) {
  auto run = [](unsigned threads) {
    return replica_reduce<double>(
        5000, [] { return 0.0; },
        [](double& a, std::size_t r) { a += CounterRng(derive_key({r})).uniform(); },
        [](double& a, const double& b) { a += b; }, threads);
  };
  EXPECT_EQ(run(1), run(4));
}
