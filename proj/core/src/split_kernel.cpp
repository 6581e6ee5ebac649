#include "bbsp/split_kernel.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "bbsp/error.hpp"

namespace bbsp {

SplitParam::SplitParam(int a, int b) {
  if (a < 1 || b < 1) throw InvalidArgument("split parameter needs positive a and b");
  int g = std::gcd(a, b);
  a_ = a / g;
  b_ = b / g;
}

SplitParam SplitParam::parse(const std::string& text) {
  auto digits = [](const std::string& t) {
    return !t.empty() && t.size() < 10 &&
           std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  auto slash = text.find('/');
  std::string num = slash == std::string::npos ? text : text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!digits(num) || !digits(den)) {
    throw ParseError("split parameter must look like B/A with positive integers, got '" + text + "'");
  }
  int b = std::stoi(num), a = std::stoi(den);
  if (a < 1 || b < 1) throw ParseError("split parameter must be positive, got '" + text + "'");
  return SplitParam(a, b);
}

std::string SplitParam::str() const { return std::to_string(b_) + "/" + std::to_string(a_); }

std::vector<double> betabin_pmf(int N, double s) {
  if (N < 0) throw InvalidArgument("negative particle count");
  if (!(s > 0.0)) throw InvalidArgument("s must be positive");
  std::vector<double> lp(static_cast<std::size_t>(N) + 1, 0.0);
  // p_{k+1}/p_k = (N-k)(k+s) / ((k+1)(N-k-1+s))
  int half = N / 2;
  for (int k = 0; k < half; ++k) {
    lp[k + 1] = lp[k] + std::log((N - k) * (k + s)) - std::log((k + 1) * (N - k - 1 + s));
  }
  for (int k = 0; k <= half; ++k) lp[N - k] = lp[k];
  double mx = *std::max_element(lp.begin(), lp.end());
  std::vector<double> p(lp.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(lp[k] - mx);
  // symmetric summation keeps p[k] == p[N-k] after normalising
  double total = 0.0;
  for (int k = 0; k < (N + 1) / 2; ++k) total += 2.0 * p[k];
  if (N % 2 == 0) total += p[half];
  for (auto& x : p) x /= total;
  return p;
}

std::vector<int> outcome_order(int N) {
  std::vector<int> ord(static_cast<std::size_t>(N) + 1);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [N](int x, int y) { return std::abs(2 * x - N) < std::abs(2 * y - N); });
  return ord;
}

int EdgeKernelRow::sample(double u) const {
  auto it = std::lower_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return order.back();
  return order[static_cast<std::size_t>(it - cum.begin())];
}

EdgeKernelRow make_row(int N, double s) {
  EdgeKernelRow r;
  r.N = N;
  r.pmf = betabin_pmf(N, s);
  r.order = outcome_order(N);
  r.cum.resize(r.order.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    acc += r.pmf[static_cast<std::size_t>(r.order[i])];
    r.cum[i] = acc;
  }
  return r;
}

SplitKernel::SplitKernel(SplitParam p, int max_total)
    : param_(p), max_total_(max_total), rows_(static_cast<std::size_t>(max_total) + 1),
      once_(new std::once_flag[static_cast<std::size_t>(max_total) + 1]) {
  if (max_total < 0) throw InvalidArgument("negative max_total");
}

const EdgeKernelRow& SplitKernel::row(int N) const {
  if (N < 0 || N > max_total_) {
    throw InvalidArgument("edge total " + std::to_string(N) + " exceeds kernel capacity " + std::to_string(max_total_));
  }
  auto i = static_cast<std::size_t>(N);
  std::call_once(once_[i], [&] { rows_[i] = std::make_unique<EdgeKernelRow>(make_row(N, param_.s())); });
  return *rows_[i];
}

int betabin_sample(int N, double s, double u) { return make_row(N, s).sample(u); }

double edge_transition_prob(const SplitKernel& kernel, int bv, int bw, int bv_new, int bw_new) {
  if (bv + bw != bv_new + bw_new || bv_new < 0 || bw_new < 0) return 0.0;
  return kernel.prob(bv + bw, bv_new);
}

double near_even_mass(int N, double s) {
  auto p = betabin_pmf(N, s);
  double m = 0.0;
  for (int k = 0; k <= N; ++k)
    if (3 * k >= N && 3 * k <= 2 * N) m += p[static_cast<std::size_t>(k)];
  return m;
}

double beta_fn(double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); }

double pstar(const SplitParam& p) {
  double s = p.s();
  if (p.b() < 20 * p.a()) {
    return std::exp(2.0 * s * std::log(5.0 / 12.0) - std::log(6.0) - (2.0 * std::lgamma(s) - std::lgamma(2.0 * s)));
  }
  return (1.0 - 20.0 / (s + 1.0)) / 6.0;
}

double beta_quantile(double s, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return boost::math::ibeta_inv(s, s, u);
}

}  // namespace bbsp
