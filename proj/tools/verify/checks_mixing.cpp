#include <algorithm>
#include <cmath>
#include <numbers>

#include "bbsp/bbsp.hpp"
#include "bbsp_tools/experiments.hpp"
#include "checks.hpp"

namespace bbsp::verify {

namespace {

CheckResult meeting_two_vertices(const Ctx& ctx) {
  const auto g = make_line(2);
  double exact = exact_meeting_times(g).at(1, 2);
  const std::size_t R = ctx.count(100'000, 20'000);
  auto mc = mc_meeting_time(g, 1, 2, 0x41, R, TimeScale::Canonical, ctx.threads);
  double z = std::abs(mc.mean - 1.0) / mc.stderr_;
  auto r = z_result("4a", "meeting time on L_2 is 1 (solve and Monte Carlo)", z, 3.0,
                    "solve " + fmtd(exact, 17) + ", MC " + fmtd(mc.mean) + " +- " + fmtd(mc.stderr_));
  r.pass = r.pass && std::abs(exact - 1.0) <= 1e-9;
  return r;
}

CheckResult mixing_two_vertices(const Ctx&) {
  ExactChain chain(make_line(2), SplitParam(1, 1), 2);
  auto mix = exact_mixing_time(chain, 0.25, 1e-12);
  double want = std::log(8.0 / 3.0);
  return max_error_result("4b", "exact t_mix(1/4) on L_2, m=2, s=1 is ln(8/3)", std::abs(mix.t_mix - want), 1e-6,
                          "got " + fmtd(mix.t_mix, 12));
}

CheckResult eigen_decay(const Ctx&) {
  double worst = 0.0;
  long long cases = 0;
  for (const auto& p : {SplitParam(1, 1), SplitParam(2, 1), SplitParam(1, 5)})
    for (auto [n, m] : {std::pair{3, 2}, {3, 3}, {4, 2}, {4, 3}}) {
      ExactChain chain(make_line(n), p, m);
      const double lambda = wilson_lambda(n);
      std::vector<double> f;
      for (const auto& x : chain.states()) f.push_back(wilson_f(x));
      for (const auto& x0 : chain.states()) {
        for (double t : {0.3, 2.0, 10.0}) {
          auto mu = chain.propagate(chain.point_mass(x0), t, 1e-13);
          double ef = 0.0;
          for (std::size_t i = 0; i < mu.size(); ++i) ef += mu[i] * f[i];
          worst = std::max(worst, std::abs(ef - std::exp(lambda * t) * wilson_f(x0)));
          ++cases;
        }
      }
    }
  return max_error_result("5a", "line eigenfunction decays at the predicted rate", worst, 1e-8,
                          std::to_string(cases) + " (start, t) pairs on L_3 and L_4");
}

CheckResult chebyshev(const Ctx&) {
  long long bad = 0, cases = 0;
  for (const auto& p : {SplitParam(1, 1), SplitParam(2, 1), SplitParam(1, 5)})
    for (auto [n, m] : {std::pair{4, 6}, {6, 4}}) {
      ExactChain chain(make_line(n), p, m);
      double inv = 1.0 / std::abs(wilson_lambda(n));
      for (const auto& c : chebyshev_lower_check(chain, p, {0.05 * inv, 0.2 * inv, 0.5 * inv, inv})) {
        ++cases;
        bad += !c.ok;
      }
    }
  return violation_result("5b", "second-moment lower bound on TV holds", bad, cases, "L_4 m=6 and L_6 m=4");
}

CheckResult wilson_mc(const Ctx& ctx) {
  const auto g = make_line(4);
  const SplitParam p(1, 1);
  SplitKernel k(p, 6);
  const Occupancy x0{6, 0, 0, 0};
  const double lambda = wilson_lambda(4);
  const std::vector<double> times{0.5 / -lambda, 1.0 / -lambda, 2.0 / -lambda};
  const std::size_t R = ctx.count(50'000, 10'000);
  using Acc = std::vector<double>;
  Acc acc = replica_reduce<Acc>(
      R, [&] { return Acc(2 * times.size(), 0.0); },
      [&](Acc& a, std::size_t r) {
        EventStream s(g, 0x5c, r);
        auto tr = simulate_bbsp(g, k, x0, times.back(), s, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
          double f = wilson_f(tr.states[i]);
          a[2 * i] += f;
          a[2 * i + 1] += f * f;
        }
      },
      [](Acc& o, const Acc& i) {
        for (std::size_t j = 0; j < o.size(); ++j) o[j] += i[j];
      },
      ctx.threads);
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double n = static_cast<double>(R), mean = acc[2 * i] / n;
    double sd = std::sqrt(std::max(acc[2 * i + 1] / n - mean * mean, 0.0) / n);
    double want = std::exp(lambda * times[i]) * wilson_f(x0);
    worst = std::max(worst, std::abs(mean - want) / sd);
    detail += fmtd(mean) + " vs " + fmtd(want) + "; ";
  }
  return z_result("5c", "simulated eigenfunction decay on L_4, m=6", worst, 3.0, detail + std::to_string(R) + " runs");
}

CheckResult tau0_slope(const Ctx&) {
  std::vector<double> lx, ly;
  for (int n : {4, 8, 16}) {
    lx.push_back(std::log(n));
    ly.push_back(std::log(tau0(make_line(n))));
  }
  double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3, sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  double slope = sxy / sxx;
  return max_error_result("6a", "tau0 grows like n^3 on lines (log-log slope)", std::abs(slope - 3.0), 0.3,
                          "slope " + fmtd(slope));
}

CheckResult cycle_band(const Ctx& ctx) {
  const SplitParam p(1, 1);
  const int m = 3;
  std::vector<double> ratios;
  std::string detail;
  for (int n : {4, 6}) {
    auto g = make_cycle(n);
    ExactChain chain(g, p, m);
    std::vector<double> times;
    for (int i = 1; i <= 60; ++i) times.push_back(0.25 * i * n);
    Occupancy x0(static_cast<std::size_t>(n), 0);
    x0[0] = m;
    auto pts = mc_tv_mixing(chain, p, x0, times, ctx.count(20'000, 4'000), 0x6b, ctx.threads);
    double t_hat = times.back();
    for (const auto& pt : pts)
      if (pt.tv_hat <= 0.25) {
        t_hat = pt.time;
        break;
      }
    double shape = n * n * std::log(n + m);
    ratios.push_back(t_hat / shape);
    detail += "n=" + std::to_string(n) + " t_mix~" + fmtd(t_hat) + " ratio " + fmtd(t_hat / shape) + "; ";
  }
  double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
  CheckResult r;
  r.id = "6b";
  r.name = "cycle mixing estimates vs n^2 log(n+m) shape";
  r.informational = true;
  r.metric = spread;
  r.threshold = 10.0;
  r.metric_kind = "ratio_spread";
  r.pass = spread <= 10.0;
  r.detail = detail + (r.pass ? "inside" : "outside") + " the factor-10 band";
  return r;
}

CheckResult reproducible(const Ctx& ctx) {
  using tools::ExperimentConfig;
  std::vector<ExperimentConfig> configs;
  auto add = [&](std::initializer_list<std::pair<const char*, const char*>> kv) {
    ExperimentConfig c;
    for (auto [k, v] : kv) c.set(k, v);
    configs.push_back(c);
  };
  add({{"command", "simulate"}, {"graph", "cycle"}, {"n", "5"}, {"m", "7"}, {"s", "3/2"}, {"seed", "11"}});
  add({{"command", "simulate"}, {"n", "4"}, {"m", "4"}, {"replicas", "600"}, {"seed", "12"}});
  add({{"command", "mabb"}, {"n", "5"}, {"m", "4"}, {"t_end", "20"}, {"seed", "13"}});
  add({{"command", "cham"}, {"n", "4"}, {"m", "3"}, {"record", "full"}, {"t_end", "100"}, {"seed", "14"}});
  add({{"command", "cham"}, {"n", "3"}, {"m", "3"}, {"replicas", "700"}, {"seed", "15"}});
  add({{"command", "meet"}, {"graph", "complete"}, {"n", "4"}, {"replicas", "300"}, {"seed", "16"}});
  add({{"command", "mix-mc"}, {"n", "3"}, {"m", "3"}, {"replicas", "500"}, {"seed", "17"}});
  add({{"command", "replay-appendix-c"}});
  long long mismatches = 0;
  for (const auto& c : configs) {
    auto a = tools::run_experiment(c, 1);
    auto b = tools::run_experiment(c, 1);
    auto d = tools::run_experiment(c, ctx.full() ? 4 : 2);
    auto ja = a.json.dump(), jb = b.json.dump(), jd = d.json.dump();
    mismatches += a.csv != b.csv || ja != jb;
    mismatches += a.csv != d.csv || ja != jd;
  }
  return violation_result("7", "same config and seed give byte-identical output", mismatches,
                          static_cast<long long>(2 * configs.size()), "reruns and thread counts 1 vs many");
}

}  // namespace

std::vector<CheckEntry> mixing_checks() {
  return {{"4a", meeting_two_vertices}, {"4b", mixing_two_vertices}, {"5a", eigen_decay}, {"5b", chebyshev},
          {"5c", wilson_mc},            {"6a", tau0_slope},          {"6b", cycle_band},  {"7", reproducible}};
}

}  // namespace bbsp::verify
