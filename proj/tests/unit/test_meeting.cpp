#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bbsp/meeting.hpp"

using namespace bbsp;

namespace {

// Dense solve of the meeting system built independently: unknowns on all
// ordered pairs, diagonal pinned to zero.
std::vector<double> dense_meeting(const WeightedGraph& g) {
  const int n = g.num_vertices();
  const double z = g.total_rate();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int r = i * n + j;
      if (i == j) {
        A(r, r) = 1.0;
        continue;
      }
      b(r) = 1.0;
      for (const auto& e : g.edges()) {
        double q = e.rate / (2 * z);
        int a = e.v - 1, c = e.w - 1;
        for (int dir = 0; dir < 2; ++dir) {
          int from = dir ? c : a, to = dir ? a : c;
          if (i == from) {
            A(r, r) += q;
            if (to != j) A(r, to * n + j) -= q;
          }
          if (j == from) {
            A(r, r) += q;
            if (to != i) A(r, i * n + to) -= q;
          }
        }
      }
    }
  Eigen::VectorXd h = A.fullPivLu().solve(b);
  return {h.data(), h.data() + h.size()};
}

}  // namespace

TEST(Meeting, TwoVertexLine) {
  auto t = exact_meeting_times(make_line(2));
  EXPECT_NEAR(t.at(1, 2), 1.0, 1e-12);
  EXPECT_EQ(t.at(1, 1), 0.0);
  EXPECT_NEAR(recommended_round_length(make_line(2)), 2.0, 1e-12);
}

TEST(Meeting, MatchesDenseOracle) {
  WeightedGraph w(5, {{1, 2, 0.5}, {2, 3, 2.0}, {3, 4, 1.0}, {4, 5, 0.25}, {1, 5, 3.0}, {2, 4, 1.5}});
  for (const auto& g : {make_line(5), make_cycle(6), make_complete(4), w}) {
    auto t = exact_meeting_times(g);
    auto d = dense_meeting(g);
    int n = g.num_vertices();
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        EXPECT_NEAR(t.at(i, j), d[(i - 1) * n + (j - 1)], 1e-9 * std::max(1.0, d[(i - 1) * n + (j - 1)]));
        EXPECT_NEAR(t.at(i, j), t.at(j, i), 1e-9 * std::max(1.0, t.at(i, j)));
      }
  }
}

TEST(Meeting, TimeScales) {
  WeightedGraph g(4, {{1, 2, 1.0}, {2, 3, 2.0}, {3, 4, 0.5}, {1, 4, 1.0}});
  auto canon = exact_meeting_times(g);
  auto canon_half = exact_meeting_times(g.halved());
  auto raw = exact_meeting_times(g, TimeScale::Raw);
  auto raw_half = exact_meeting_times(g.halved(), TimeScale::Raw);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      EXPECT_NEAR(canon.at(i, j), canon_half.at(i, j), 1e-9 * (1 + canon.at(i, j)));
      EXPECT_NEAR(raw_half.at(i, j), 2 * raw.at(i, j), 1e-9 * (1 + raw.at(i, j)));
      EXPECT_NEAR(canon.at(i, j), raw.at(i, j) * g.total_rate(), 1e-9 * (1 + canon.at(i, j)));
    }
}

TEST(Meeting, MonteCarloAgrees) {
  auto l2 = make_line(2);
  auto est = mc_meeting_time(l2, 1, 2, 17, 100000);
  EXPECT_NEAR(est.mean, 1.0, 3 * est.stderr_);
  auto c5 = make_cycle(5);
  auto ex = exact_meeting_times(c5);
  auto est2 = mc_meeting_time(c5, 1, 3, 18, 50000);
  EXPECT_NEAR(est2.mean, ex.at(1, 3), 4 * est2.stderr_);
}

TEST(Meeting, Tau0GrowsCubicallyOnLines) {
  std::vector<double> x, y;
  for (int n : {4, 8, 16}) {
    x.push_back(std::log(n));
    y.push_back(std::log(tau0(make_line(n))));
  }
  double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3, sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, 3.0, 0.3);
  // two vertices: E_1 T_2 = 2, averaged with zeros on the diagonal
  EXPECT_NEAR(tau0(make_line(2)), 1.0, 1e-12);
  auto h = hitting_times_to(make_line(3), 3);
  EXPECT_NEAR(h[2], 0.0, 0.0);
  EXPECT_GT(h[0], h[1]);
}

TEST(Meeting, LargeGraphUsesIterativeSolver) {
  auto g = make_cycle(110);
  auto t = exact_meeting_times(g);
  // symmetry of the cycle: depends only on the distance
  EXPECT_NEAR(t.at(1, 30), t.at(50, 79), 1e-6 * t.at(1, 30));
  EXPECT_NEAR(t.at(1, 30), t.at(30, 1), 1e-6 * t.at(1, 30));
}
