#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace bbsp {

// Splitting parameter s = b/a in lowest terms (a, b >= 1).
class SplitParam {
 public:
  SplitParam(int a, int b);
  // Accepts "B/A" or a plain positive integer "B".
  static SplitParam parse(const std::string& text);

  int a() const { return a_; }
  int b() const { return b_; }
  double s() const { return static_cast<double>(b_) / a_; }
  // chi(k) = a*k + b: number of non-black slots at a vertex holding k blacks.
  long long colour(long long k) const { return static_cast<long long>(a_) * k + b_; }
  std::string str() const;

  friend bool operator==(const SplitParam&, const SplitParam&) = default;

 private:
  int a_, b_;
};

// BetaBin(N, s, s) pmf. Exactly symmetric, sums to 1 up to rounding.
std::vector<double> betabin_pmf(int N, double s);

// Split outcomes in sampling order: increasing |k - N/2|, ties with fewer
// particles on the lower endpoint first.
std::vector<int> outcome_order(int N);

// Cached kernel data for one edge total N.
struct EdgeKernelRow {
  int N = 0;
  std::vector<double> pmf;  // pmf[k] = P(k particles end on the lower endpoint)
  std::vector<int> order;   // outcome_order(N)
  std::vector<double> cum;  // cumulative pmf along order
  // Inverse cdf along order: first i with cum[i] >= u.
  int sample(double u) const;
};

EdgeKernelRow make_row(int N, double s);

// Thread safe, lazily filled cache of rows for N = 0..max_total.
class SplitKernel {
 public:
  SplitKernel(SplitParam p, int max_total);

  const SplitParam& param() const { return param_; }
  int max_total() const { return max_total_; }
  const EdgeKernelRow& row(int N) const;
  int sample(int N, double u) const { return row(N).sample(u); }
  double prob(int N, int k) const { return row(N).pmf[static_cast<std::size_t>(k)]; }

 private:
  SplitParam param_;
  int max_total_;
  mutable std::vector<std::unique_ptr<EdgeKernelRow>> rows_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

int betabin_sample(int N, double s, double u);

// P(B -> B') for one ringing edge given its black counts before and after.
double edge_transition_prob(const SplitKernel& kernel, int bv, int bw, int bv_new, int bw_new);

// Mass of the near-even outcomes N/3 <= k <= 2N/3.
double near_even_mass(int N, double s);

// Uniform lower bound on near_even_mass.
double pstar(const SplitParam& p);
double beta_fn(double x, double y);

// Beta(s, s) quantile: the p with I_p(s, s) = u.
double beta_quantile(double s, double u);

}  // namespace bbsp
