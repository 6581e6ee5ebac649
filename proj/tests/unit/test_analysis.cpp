#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <numbers>

#include "bbsp/analysis.hpp"
#include "bbsp/error.hpp"

using namespace bbsp;

TEST(Analysis, UniformizationMatchesDenseExponential) {
  struct Case {
    WeightedGraph g;
    SplitParam p;
    int m;
  };
  std::vector<Case> cases = {{make_line(3), {1, 1}, 3},
                             {make_cycle(4), {2, 1}, 3},
                             {WeightedGraph(3, {{1, 2, 0.2}, {2, 3, 3.0}}), {2, 3}, 4},
                             {make_complete(4), {1, 5}, 4}};
  for (const auto& c : cases) {
    ExactChain chain(c.g, c.p, c.m);
    ASSERT_LE(chain.size(), 200u);
    const int S = static_cast<int>(chain.size());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(S, S);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j)
        if (i != j) Q(i, j) = chain.rate(i, j);
      Q(i, i) = -chain.exit_rate(i);
    }
    for (double t : {0.1, 1.0, 7.0}) {
      Eigen::MatrixXd P = (Q * t).exp();
      auto mu = chain.propagate(chain.point_mass(chain.states()[0]), t, 1e-12);
      for (int j = 0; j < S; ++j) EXPECT_NEAR(mu[j], P(0, j), 1e-10);
    }
  }
}

TEST(Analysis, TwoVertexTvClosedForm) {
  ExactChain chain(make_line(2), SplitParam(1, 1), 2);
  auto tv = exact_tv_curve(chain, chain.point_mass({2, 0}), {0.0, 0.5, 1.0, 3.0});
  for (auto [i, t] : {std::pair{0, 0.0}, {1, 0.5}, {2, 1.0}, {3, 3.0}})
    EXPECT_NEAR(tv[i], 2.0 / 3.0 * std::exp(-t), 1e-10);
  auto mix = exact_mixing_time(chain, 0.25);
  EXPECT_NEAR(mix.t_mix, std::log(8.0 / 3.0), 1e-6);
  EXPECT_EQ(mix.starts, "all");
}

TEST(Analysis, LongHorizonPropagation) {
  ExactChain chain(make_line(3), SplitParam(1, 1), 2);
  auto mu = chain.propagate(chain.point_mass({2, 0, 0}), 5000.0);
  EXPECT_LT(tv_distance(mu, chain.stationary()), 1e-9);
  double s = 0;
  for (double x : mu) s += x;
  EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(Analysis, WilsonEigenfunction) {
  for (int n : {2, 3, 4, 5})
    for (int m : {1, 2, 4})
      for (auto p : {SplitParam(2, 1), SplitParam(1, 1), SplitParam(1, 5)}) {
        ExactChain chain(make_line(n), p, m);
        std::vector<double> f(chain.size()), qf;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = wilson_f(chain.states()[i]);
        chain.apply_right(f, qf);
        double lam = wilson_lambda(n);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(qf[i], lam * f[i], 1e-12);
      }
  EXPECT_NEAR(wilson_lambda(4), (std::cos(std::numbers::pi / 4) - 1) / 3, 1e-15);
  EXPECT_NEAR(wilson_lambda(4), -0.0976310729, 1e-9);
  EXPECT_NEAR(wilson_f({1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(wilson_f({2, 0}), 1.0, 1e-15);
}

TEST(Analysis, ChebyshevBound) {
  ExactChain chain(make_line(3), SplitParam(1, 1), 3);
  double inv = 1.0 / std::abs(wilson_lambda(3));
  auto checks = chebyshev_lower_check(chain, SplitParam(1, 1), {0.1 * inv, 0.5 * inv, inv});
  for (const auto& c : checks) {
    EXPECT_TRUE(c.ok);
    EXPECT_NEAR(c.mean_f, c.predicted_mean_f, 1e-8);
  }
  // L_3 has floor(3/2) = 1 so the start is all particles on vertex 1
  auto mu0 = half_profile_law(chain, SplitParam(1, 1));
  EXPECT_DOUBLE_EQ(mu0[chain.index().rank({3, 0, 0})], 1.0);
}

TEST(Analysis, LineLowerBound) {
  EXPECT_NEAR(line_lower_bound(10, 10, 1.0), 1000 / (std::numbers::pi * std::numbers::pi) * (std::log(10) - std::log(3)),
              1e-10);
  EXPECT_LT(line_lower_bound(2, 1, 0.1), 0.0);
}

TEST(Analysis, MonteCarloTvWithinBand) {
  ExactChain chain(make_line(2), SplitParam(1, 1), 2);
  auto pts = mc_tv_mixing(chain, SplitParam(1, 1), {2, 0}, {0.2, 1.0, 2.0}, 40000, 5);
  for (const auto& pt : pts) {
    EXPECT_NEAR(pt.tv_exact, 2.0 / 3.0 * std::exp(-pt.time), 1e-9);
    EXPECT_LE(std::abs(pt.tv_hat - pt.tv_exact), pt.tolerance + pt.plugin_bias);
  }
  ExactChain big(make_line(6), SplitParam(1, 1), 20);
  EXPECT_THROW(mc_tv_mixing(big, SplitParam(1, 1), {20, 0, 0, 0, 0, 0}, {1.0}, 10, 1), StateSpaceTooLarge);
}

TEST(Analysis, BoundReportConstants) {
  auto r = bound_report(make_line(4), SplitParam(1, 1), 4, 0.25, true);
  EXPECT_NEAR(r.pstar, 25.0 / 864, 1e-15);
  EXPECT_NEAR(r.K, 5971968.0 / 625.0, 1e-8);
  EXPECT_NEAR(r.loss_c, r.pstar * r.pstar / 4, 1e-18);
  EXPECT_NEAR(r.c_s, 1.0 / (4 * r.K * std::log(12 / (r.pstar * r.pstar))), 1e-18);
  EXPECT_NEAR(r.upper_coeff, std::log(12 / (r.pstar * r.pstar)) / (r.pstar * r.pstar) * std::log(2.0), 1e-6);
  EXPECT_TRUE(r.lower_bound_vacuous == (r.lower_bound <= 0));
  auto r40 = bound_report(make_cycle(4), SplitParam(1, 40), 4);
  EXPECT_NEAR(r40.pstar, 7.0 / 82, 1e-15);
  EXPECT_TRUE(std::isnan(r40.lower_bound));
}
