#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <map>

#include "bbsp/bbsp_sim.hpp"
#include "bbsp/chameleon.hpp"
#include "bbsp/error.hpp"
#include "bbsp/mabb.hpp"
#include "bbsp/meeting.hpp"

using namespace bbsp;

namespace {

const std::vector<SplitParam> kGrid = {{2, 1}, {1, 1}, {2, 3}, {1, 5}};

// Structural invariants that must hold between events.
void check_state(const ChameleonState& st) {
  ASSERT_NO_THROW(check_invariants(st));
  long long R = 0, P = 0;
  for (Vertex v = 1; v <= st.n(); ++v) {
    ASSERT_GE(st.red[v - 1], 0);
    ASSERT_GE(st.pink[v - 1], 0);
    ASSERT_GE(st.white(v), 0);
    ASSERT_LE(st.ink(v), static_cast<double>(st.param.colour(st.black[v - 1])));
    R += st.red[v - 1];
    P += st.pink[v - 1];
  }
  ASSERT_EQ(R, st.total_red);
  ASSERT_EQ(P, st.total_pink);
  ASSERT_EQ(P % 2, 0);
  std::vector<int> lr(st.n(), 0), lw(st.n(), 0);
  for (int j = 0; j < st.num_labels; ++j) {
    if (st.red_label[j]) ++lr[st.red_label[j] - 1];
    if (st.white_label[j]) ++lw[st.white_label[j] - 1];
    // labels only disappear in pairs
    ASSERT_EQ(st.red_label[j] == 0, st.white_label[j] == 0);
  }
  for (Vertex v = 1; v <= st.n(); ++v) {
    ASSERT_LE(lr[v - 1], st.red[v - 1]);
    ASSERT_LE(lw[v - 1], st.white(v));
  }
}

}  // namespace

TEST(Chameleon, InitialLabels) {
  auto st = init_chameleon(SplitParam(1, 1), {1, 0, 1}, 1);
  EXPECT_EQ(st.slots, 5);
  EXPECT_EQ(st.red, (std::vector<int>{2, 0, 0}));
  EXPECT_EQ(st.num_labels, 2);
  EXPECT_EQ(st.red_label[0], 1);
  EXPECT_EQ(st.red_label[1], 1);
  EXPECT_EQ(st.white_label[0], 2);
  EXPECT_EQ(st.white_label[1], 3);
  EXPECT_EQ(st.red_label[2], 0);
  EXPECT_DOUBLE_EQ(st.total_ink(), 2.0);
  check_state(st);
  // more reds than whites: every white labelled
  auto big = init_chameleon(SplitParam(1, 1), {3, 0}, 1);
  EXPECT_EQ(big.num_labels, 1);
  EXPECT_EQ(big.white_label[0], 2);
}

TEST(Chameleon, InvariantCheckCatchesCorruption) {
  auto st = init_chameleon(SplitParam(1, 1), {1, 0, 1}, 1);
  auto bad = st;
  bad.red[0] = 5;
  EXPECT_THROW(check_invariants(bad), InvariantViolation);
  bad = st;
  bad.total_pink = 1;
  EXPECT_THROW(check_invariants(bad), InvariantViolation);
  bad = st;
  bad.white_label[0] = 1;  // vertex 1 has no whites
  EXPECT_THROW(check_invariants(bad), InvariantViolation);
}

TEST(Chameleon, PlacementBoundsExample) {
  // edge with 3 red, 2 pink, 1 white, both endpoints get 3 slots
  SplitParam p(1, 1);
  auto b = placement_bounds(p, 2, 2, 2, 3, 2);
  EXPECT_EQ(b.cap_v, 3);
  EXPECT_EQ(b.cap_w, 3);
  EXPECT_EQ(b.l_v, 0);
  EXPECT_EQ(b.u_v, 3);
  EXPECT_EQ(b.l_w, 0);
  EXPECT_EQ(b.u_w, 3);
  EXPECT_EQ(b.lp_v, 2);
  EXPECT_EQ(b.up_v, 0);
  EXPECT_DOUBLE_EQ(b.theta_v, 0.5);
  EXPECT_DOUBLE_EQ(b.m_star_v, 2.0);
}

TEST(Chameleon, ThetaSandwichAndBounds) {
  for (const auto& p : kGrid) {
    for (int N = 0; N <= 4; ++N)
      for (int bv = 0; bv <= N; ++bv)
        for (int kv = 0; kv <= N; ++kv) {
          long long slots = p.colour(bv) + p.colour(N - bv);
          double stay = marked_stay_prob(p, N, kv);
          double eta = std::min(stay, 1 - stay);
          for (long long R = 0; R <= slots; ++R)
            for (long long P = 0; R + P <= slots; ++P) {
              auto b = placement_bounds(p, bv, N - bv, kv, R, P);
              double lo = b.l_v + 0.5 * b.lp_v, hi = b.u_v + 0.5 * b.up_v;
              EXPECT_LE(lo, b.m_star_v + 1e-12);
              EXPECT_GE(hi, b.m_star_v - 1e-12);
              if (hi > lo) {
                EXPECT_NEAR(b.theta_v * lo + (1 - b.theta_v) * hi, b.m_star_v, 1e-12);
                EXPECT_GE(b.theta_v, eta - 1e-12);
                EXPECT_LE(b.theta_v, 1 - eta + 1e-12);
              }
              EXPECT_EQ(b.l_v + b.u_w, R);
              EXPECT_EQ(b.lp_v + b.up_w, P);
            }
        }
  }
}

TEST(Chameleon, DepinkDelta) {
  EXPECT_EQ(depink_delta(1, 10), 1);
  EXPECT_EQ(depink_delta(3, 10), 1);
  EXPECT_EQ(depink_delta(4, 10), 2);
  EXPECT_EQ(depink_delta(9, 10), 1);
  EXPECT_EQ(depink_delta(5, 10), 2);
}

// Runs many events on assorted configurations and checks every invariant,
// including exact ink conservation per event.
TEST(Chameleon, StepInvariants) {
  for (const auto& p : kGrid) {
    for (const auto& g : {make_line(4), make_cycle(5), make_complete(4)}) {
      int n = g.num_vertices();
      SplitKernel k(p, 12);
      Occupancy black(n, 0);
      black[0] = 3;
      black[n - 1] = 2;
      for (auto mode : {ChameleonMode::Standard, ChameleonMode::Modified}) {
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
          auto st = init_chameleon(p, black, 2);
          EventStream s(g, 100 + rep);
          ChameleonConfig cfg;
          cfg.round_length = 3.0;
          cfg.mode = mode;
          cfg.t_end = 60.0;
          long long ink2 = st.ink2();
          double last_round_end = 0.0;
          run_chameleon(g, k, st, s, cfg, [&](double t, const ChameleonState& x, ChameleonPoint pt, const StepTrace*) {
            check_state(x);
            if (pt == ChameleonPoint::Event) {
              ASSERT_EQ(x.ink2(), ink2) << "ink changed away from a round end";
            } else {
              last_round_end = t;
              ink2 = x.ink2();
            }
          });
        }
      }
    }
  }
}

TEST(Chameleon, LiterallyInfeasibleEdgeIsHandled) {
  // 3 red, 2 pink, 1 white on an edge whose endpoints both end with 3 slots
  auto g = make_line(2);
  SplitParam p(1, 1);
  SplitKernel k(p, 4);
  ChameleonState st = init_chameleon(p, {2, 2}, 1);
  st.red = {3, 0};
  st.pink = {0, 2};
  st.total_red = 3;
  st.total_pink = 2;
  assign_labels(st);
  // find events where the split keeps 2 and 2
  EventStream s(g, 4);
  int hits = 0;
  for (int i = 0; i < 2000 && hits < 200; ++i) {
    Event ev = s.next();
    if (k.sample(4, ev.ub) != 2) continue;
    ++hits;
    ChameleonState x = st;
    StepTrace tr;
    ASSERT_NO_THROW(chameleon_step(g, k, x, ev, ChameleonMode::Standard, &tr));
    check_state(x);
    EXPECT_EQ(x.ink2(), st.ink2());
  }
  EXPECT_GT(hits, 50);
}

// Expected ink on v after one step equals m*(v).
TEST(Chameleon, OneStepMeanInk) {
  struct Case {
    SplitParam p;
    Occupancy black;
    std::vector<int> red, pink;
  };
  std::vector<Case> cases = {
      {{1, 1}, {2, 2}, {3, 0}, {0, 2}},
      {{1, 1}, {1, 0}, {1, 0}, {0, 0}},
      {{2, 1}, {1, 2}, {1, 2}, {2, 0}},
      {{2, 3}, {0, 3}, {2, 3}, {0, 2}},
      {{1, 5}, {1, 1}, {2, 1}, {2, 2}},
      {{1, 1}, {0, 1}, {0, 0}, {1, 1}},
  };
  auto g = make_line(2);
  for (const auto& c : cases) {
    SplitKernel k(c.p, 10);
    ChameleonState st = init_chameleon(c.p, c.black, 1);
    st.red = c.red;
    st.pink = c.pink;
    st.total_red = c.red[0] + c.red[1];
    st.total_pink = c.pink[0] + c.pink[1];
    assign_labels(st);
    check_state(st);
    const int N = c.black[0] + c.black[1];
    for (int kv = 0; kv <= N; ++kv) {
      auto b = placement_bounds(c.p, c.black[0], c.black[1], kv, st.total_red, st.total_pink);
      // fixed split, fresh colour randomness
      Event ev;
      ev.edge = 0;
      const auto& row = k.row(N);
      std::size_t pos = std::find(row.order.begin(), row.order.end(), kv) - row.order.begin();
      ev.ub = row.cum[pos] - 0.5 * row.pmf[kv];
      const int R = 40000;
      double s = 0.0, s2 = 0.0;
      for (int r = 0; r < R; ++r) {
        ev.uc_bits = mix64(1000003ULL * r + kv);
        ChameleonState x = st;
        chameleon_step(g, k, x, ev, ChameleonMode::Standard);
        ASSERT_EQ(x.black[0], kv);
        double iv = x.ink(1);
        s += iv;
        s2 += iv * iv;
      }
      double mean = s / R, var = std::max(s2 / R - mean * mean, 0.0);
      EXPECT_NEAR(mean, b.m_star_v, 4 * std::sqrt(var / R) + 1e-12) << "kv=" << kv;
    }
  }
}

// Paired reds survive Step 1: at least min(k, chi(B'(v)), chi(B'(w))) remain.
TEST(Chameleon, PairedRedsSurviveLowerBoundPlacement) {
  for (const auto& p : kGrid) {
    auto g = make_cycle(4);
    SplitKernel k(p, 12);
    auto st = init_chameleon(p, {2, 0, 1, 1}, 3);
    EventStream s(g, 55);
    ChameleonConfig cfg;
    cfg.round_length = 2.0;
    cfg.t_end = 200.0;
    cfg.stop_on_absorption = false;
    int checked = 0;
    run_chameleon(g, k, st, s, cfg, [&](double, const ChameleonState&, ChameleonPoint pt, const StepTrace* tr) {
      if (pt != ChameleonPoint::Event || !tr->had_reds) return;
      long long bound = std::min<long long>({tr->paired_before, tr->bounds.cap_v, tr->bounds.cap_w});
      EXPECT_GE(tr->paired_in_pile, bound);
      ++checked;
    });
    EXPECT_GT(checked, 20);
  }
}

TEST(Chameleon, BlacksFollowPlainProcess) {
  auto g = make_cycle(5);
  SplitParam p(2, 3);
  SplitKernel k(p, 10);
  Occupancy black{3, 0, 1, 0, 2};
  auto st = init_chameleon(p, black, 2);
  EventStream s1(g, 12), s2(g, 12);
  ChameleonConfig cfg;
  cfg.round_length = 4.0;
  cfg.t_end = 30.0;
  cfg.stop_on_absorption = false;
  cfg.sample_times = {1.0, 7.5, 30.0};
  auto run = run_chameleon(g, k, st, s1, cfg);
  auto tr = simulate_bbsp(g, k, black, 30.0, s2, cfg.sample_times);
  ASSERT_EQ(run.samples.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(run.samples[i].black, tr.states[i]);
}

TEST(Chameleon, ModifiedModePinkensEveryPair) {
  // with one labelled pair on the edge and the coin branch forced, the
  // modified mode always pinkens it
  auto g = make_line(2);
  SplitParam p(1, 1);
  SplitKernel k(p, 2);
  auto st = init_chameleon(p, {0, 0}, 1);  // 1 red at 1, 1 white at 2
  ASSERT_EQ(st.num_labels, 1);
  EventStream s(g, 3);
  int branch_a = 0;
  for (int i = 0; i < 500; ++i) {
    Event ev = s.next();
    for (auto mode : {ChameleonMode::Standard, ChameleonMode::Modified}) {
      ChameleonState x = st;
      StepTrace tr;
      chameleon_step(g, k, x, ev, mode, &tr);
      if (tr.branch_a) {
        ++branch_a;
        EXPECT_EQ(tr.pinkened, 1);
      }
    }
  }
  EXPECT_GT(branch_a, 0);
}

TEST(Chameleon, DepinkingWalkAndFill) {
  auto g = make_line(3);
  SplitParam p(1, 1);
  SplitKernel k(p, 2);
  Occupancy black{1, 0, 1};
  const double T = recommended_round_length(g);
  const double L = 5.0;
  const double start = 2.0;  // chi(1)
  int fills = 0, ups = 0, steps = 0;
  const int R = 4000;
  for (int r = 0; r < R; ++r) {
    auto st = init_chameleon(p, black, 1);
    EventStream s(g, 900, r);
    ChameleonConfig cfg;
    cfg.round_length = T;
    auto run = run_chameleon(g, k, st, s, cfg);
    ASSERT_TRUE(run.absorbed);
    fills += run.fill;
    double ink = start;
    for (const auto& d : run.depinks) {
      ASSERT_DOUBLE_EQ(d.ink_before, ink);
      double step = static_cast<double>(depink_delta(static_cast<long long>(ink), 5));
      ASSERT_DOUBLE_EQ(std::abs(d.ink_after - d.ink_before), step);
      ups += d.up;
      ++steps;
      ink = d.ink_after;
    }
    EXPECT_TRUE(ink == 0.0 || ink == L);
  }
  double q = start / L;
  EXPECT_NEAR(double(fills) / R, q, 4 * std::sqrt(q * (1 - q) / R));
  EXPECT_NEAR(double(ups) / steps, 0.5, 4 * std::sqrt(0.25 / steps));
}

// A labelled red / white pair moves like two independent walks on the halved
// graph until they meet.
TEST(Chameleon, LabelledPairBeforeMeeting) {
  auto g = make_line(3);
  SplitParam p(1, 1);
  SplitKernel k(p, 2);
  // one red at 1, whites elsewhere; label 0 pairs the red with the white at 2
  Occupancy black{0, 0, 0};
  auto st0 = init_chameleon(p, black, 1);
  ASSERT_EQ(st0.red_label[0], 1);
  ASSERT_EQ(st0.white_label[0], 2);
  // product chain of two walks, each crossing an edge at rate 1/(2 * 2)
  const int n = 3;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n * n + 1, n * n + 1);
  const int dead = n * n;
  auto id = [](int a, int b) { return (a - 1) * 3 + (b - 1); };
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      for (int w = 0; w < 2; ++w) {
        int here = w ? b : a, other = w ? a : b;
        for (int to : {here - 1, here + 1}) {
          if (to < 1 || to > n) continue;
          int dst = to == other ? dead : (w ? id(a, to) : id(to, b));
          Q(id(a, b), dst) += 0.25;
          Q(id(a, b), id(a, b)) -= 0.25;
        }
      }
    }
  const double t = 1.3;
  Eigen::MatrixXd Pt = (Q * t).exp();
  const int R = 100000;
  std::vector<double> cnt(n * n, 0.0);
  for (int r = 0; r < R; ++r) {
    ChameleonState st = st0;
    EventStream s(g, 4242, r);
    bool met = false;
    for (;;) {
      const Event& pk = s.peek();
      if (pk.time > t) break;
      Event ev = s.next();
      const Edge& e = g.edge(ev.edge);
      auto on = [&](Vertex x) { return x == e.v || x == e.w; };
      if (on(st.red_label[0]) && on(st.white_label[0])) {
        met = true;
        break;
      }
      chameleon_step(g, k, st, ev, ChameleonMode::Standard);
    }
    if (!met) cnt[id(st.red_label[0], st.white_label[0])] += 1;
  }
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      double q = Pt(id(1, 2), id(a, b));
      EXPECT_NEAR(cnt[id(a, b)] / R, q, 4 * std::sqrt(q * (1 - q) / R) + 1e-12) << a << "," << b;
    }
}

TEST(Chameleon, FirstDepinkingMoment) {
  auto g = make_line(3);
  SplitParam p(1, 1);
  SplitKernel k(p, 2);
  const double T = recommended_round_length(g);
  const double ps = pstar(p);
  const double K = 8.0 / (ps * ps);
  const int R = 3000;
  double s = 0.0, s2 = 0.0;
  int seen = 0;
  for (int r = 0; r < R; ++r) {
    auto st = init_chameleon(p, {1, 0, 1}, 2);
    EventStream ev(g, 321, r);
    ChameleonConfig cfg;
    cfg.round_length = T;
    auto run = run_chameleon(g, k, st, ev, cfg);
    if (run.depinks.empty()) continue;
    double x = std::exp(run.depinks.front().time / (K * T));
    s += x;
    s2 += x * x;
    ++seen;
  }
  ASSERT_GT(seen, 0);
  double mean = s / seen, sd = std::sqrt(std::max(s2 / seen - mean * mean, 0.0) / seen);
  EXPECT_LE(mean, 12.0 / (ps * ps) + 3 * sd);
}
