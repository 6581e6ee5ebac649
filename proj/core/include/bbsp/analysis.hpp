#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/split_kernel.hpp"
#include "bbsp/state_space.hpp"

namespace bbsp {

// Full generator of the process on a small state space.
class ExactChain {
 public:
  ExactChain(const WeightedGraph& g, const SplitParam& p, int m, TimeScale scale = TimeScale::Canonical,
             std::size_t cap = kDefaultStateCap);

  std::size_t size() const { return states_.size(); }
  const std::vector<Occupancy>& states() const { return states_; }
  const StateIndex& index() const { return index_; }
  const std::vector<double>& stationary() const { return pi_; }
  const WeightedGraph& graph() const { return g_; }
  int particles() const { return m_; }
  double max_exit_rate() const { return max_exit_; }

  // Off diagonal rate from state i to state j (0 if none).
  double rate(std::size_t i, std::size_t j) const;
  double exit_rate(std::size_t i) const { return exit_[i]; }

  // y = x Q for a row vector x.
  void apply_left(const std::vector<double>& x, std::vector<double>& y) const;
  // y = Q f for a column vector f.
  void apply_right(const std::vector<double>& f, std::vector<double>& y) const;

  // Law at time t from law mu, by uniformization with L1 error <= tol.
  std::vector<double> propagate(const std::vector<double>& mu, double t, double tol = 1e-10) const;

  std::vector<double> point_mass(const Occupancy& x) const;

 private:
  WeightedGraph g_;
  int m_;
  std::vector<Occupancy> states_;
  StateIndex index_;
  std::vector<double> pi_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
  std::vector<double> exit_;
  double max_exit_ = 0.0;
};

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu);

// TV(mu_t, pi) at each (sorted) time.
std::vector<double> exact_tv_curve(const ExactChain& chain, const std::vector<double>& mu0,
                                   const std::vector<double>& times, double tol = 1e-10);

struct MixingResult {
  double t_mix = 0.0;
  Occupancy worst_start;
  std::string starts;  // "all" or "corners"
};

// inf{t : max_start TV <= eps}. All starts when |states| <= all_starts_limit,
// otherwise only the states with every particle on one vertex.
MixingResult exact_mixing_time(const ExactChain& chain, double eps, double tol = 1e-9,
                               std::size_t all_starts_limit = 500);

struct McTvPoint {
  double time = 0.0;
  double tv_hat = 0.0;
  double tv_exact = 0.0;
  double tolerance = 0.0;    // 4 sigma band from per state binomial noise
  double plugin_bias = 0.0;  // expected plug-in upward bias at the observed law
};

std::vector<McTvPoint> mc_tv_mixing(const ExactChain& chain, const SplitParam& p, const Occupancy& x0,
                                    const std::vector<double>& times, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads = 0, std::size_t state_limit = 10'000);

// Line eigenfunction: f(x) = sum_{k=1}^{n-1} sin(pi k/n) (sum_{i<=k} x_i - m k/n).
double wilson_f(const Occupancy& x);
double wilson_lambda(int n);

// (n^3/pi^2)(log n - log(1 + n/m + 1/s) - c_eps); may be negative.
double line_lower_bound(int n, int m, double s, double c_eps = 0.0);

struct ChebyshevCheck {
  double time = 0.0;
  double tv = 0.0;
  double bound = 0.0;
  double mean_f = 0.0;
  double predicted_mean_f = 0.0;
  bool ok = false;
};

// Start: iid NegBin profile on the first floor(n/2) vertices conditioned on
// the sum m (exact law); event {f >= E f(x_t) / 2}.
std::vector<ChebyshevCheck> chebyshev_lower_check(const ExactChain& line_chain, const SplitParam& p,
                                                  const std::vector<double>& times);
std::vector<double> half_profile_law(const ExactChain& line_chain, const SplitParam& p);

struct BoundReport {
  int a = 1, b = 1;
  double s = 1.0;
  double pstar = 0.0;
  double K = 0.0;
  double c_s = 0.0;
  double loss_c = 0.0;
  double depink_moment_bound = 0.0;
  double upper_coeff = 0.0;  // C(s) / C'
  double max_meeting = 0.0;
  double recommended_T = 0.0;
  double upper_bound_over_cprime = 0.0;  // t_mix upper bound divided by C'
  double lower_bound = 0.0;              // line only, else NaN
  bool lower_bound_vacuous = false;
  int n = 0, m = 0;
  double eps = 0.25;
};

BoundReport bound_report(const WeightedGraph& g, const SplitParam& p, int m, double eps = 0.25, bool is_line = false,
                         double c_eps = 0.0, TimeScale scale = TimeScale::Canonical);

}  // namespace bbsp
