#include "bbsp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bbsp/bbsp_sim.hpp"
#include "bbsp/error.hpp"
#include "bbsp/meeting.hpp"
#include "bbsp/parallel.hpp"

namespace bbsp {

ExactChain::ExactChain(const WeightedGraph& g, const SplitParam& p, int m, TimeScale scale, std::size_t cap)
    : g_(g), m_(m), states_(enumerate_states(g.num_vertices(), m, cap)), index_(g.num_vertices(), m) {
  pi_ = stationary_dist(states_, p);
  const double z = scale == TimeScale::Canonical ? g.total_rate() : 1.0;
  SplitKernel kernel(p, m);
  exit_.assign(states_.size(), 0.0);
  row_ptr_.reserve(states_.size() + 1);
  row_ptr_.push_back(0);
  Occupancy y;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Occupancy& x = states_[i];
    std::vector<std::pair<std::uint32_t, double>> row;
    for (const auto& e : g.edges()) {
      auto iv = static_cast<std::size_t>(e.v - 1), iw = static_cast<std::size_t>(e.w - 1);
      int N = x[iv] + x[iw];
      if (N == 0) continue;
      const auto& pmf = kernel.row(N).pmf;
      y = x;
      for (int k = 0; k <= N; ++k) {
        if (k == x[iv]) continue;
        y[iv] = k;
        y[iw] = N - k;
        double r = e.rate / z * pmf[static_cast<std::size_t>(k)];
        row.emplace_back(static_cast<std::uint32_t>(index_.rank(y)), r);
        exit_[i] += r;
      }
    }
    std::sort(row.begin(), row.end());
    for (const auto& [c, r] : row) {
      col_.push_back(c);
      val_.push_back(r);
    }
    row_ptr_.push_back(col_.size());
    max_exit_ = std::max(max_exit_, exit_[i]);
  }
}

double ExactChain::rate(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_[k] == j) return val_[k];
  return 0.0;
}

void ExactChain::apply_left(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    y[i] -= xi * exit_[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_[k]] += xi * val_[k];
  }
}

void ExactChain::apply_right(const std::vector<double>& f, std::vector<double>& y) const {
  y.assign(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = -exit_[i] * f[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * f[col_[k]];
    y[i] = s;
  }
}

std::vector<double> ExactChain::propagate(const std::vector<double>& mu, double t, double tol) const {
  if (mu.size() != states_.size()) throw InvalidArgument("law has wrong dimension");
  if (t < 0.0) throw InvalidArgument("negative time");
  if (t == 0.0 || max_exit_ == 0.0) return mu;
  const double lam = max_exit_;
  // keep lam * dt moderate so the Poisson weights do not underflow
  const double kMaxMean = 400.0;
  int chunks = std::max(1, static_cast<int>(std::ceil(lam * t / kMaxMean)));
  double dt = t / chunks;
  double chunk_tol = tol / chunks;
  double x = lam * dt;
  std::vector<double> cur = mu, term, out, qv;
  for (int c = 0; c < chunks; ++c) {
    term = cur;
    double w = std::exp(-x);
    double acc_w = w;
    out.assign(cur.size(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) out[i] = w * term[i];
    for (int k = 1; 1.0 - acc_w > chunk_tol; ++k) {
      // term <- term K, K = I + Q / lam
      apply_left(term, qv);
      for (std::size_t i = 0; i < term.size(); ++i) term[i] += qv[i] / lam;
      w *= x / k;
      acc_w += w;
      for (std::size_t i = 0; i < cur.size(); ++i) out[i] += w * term[i];
      if (k > 100000) throw Error("uniformization did not converge");
    }
    cur.swap(out);
  }
  return cur;
}

std::vector<double> ExactChain::point_mass(const Occupancy& x) const {
  if (static_cast<int>(x.size()) != g_.num_vertices() || total(x) != m_) {
    throw InvalidArgument("start state does not match the chain");
  }
  std::vector<double> mu(states_.size(), 0.0);
  mu[index_.rank(x)] = 1.0;
  return mu;
}

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

std::vector<double> exact_tv_curve(const ExactChain& chain, const std::vector<double>& mu0,
                                   const std::vector<double>& times, double tol) {
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("times must be sorted");
  std::vector<double> out;
  std::vector<double> mu = mu0;
  double t_prev = 0.0;
  for (double t : times) {
    mu = chain.propagate(mu, t - t_prev, tol / static_cast<double>(std::max<std::size_t>(times.size(), 1)));
    t_prev = t;
    out.push_back(tv_distance(mu, chain.stationary()));
  }
  return out;
}

MixingResult exact_mixing_time(const ExactChain& chain, double eps, double tol, std::size_t all_starts_limit) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
  MixingResult res;
  std::vector<std::size_t> starts;
  if (chain.size() <= all_starts_limit) {
    res.starts = "all";
    for (std::size_t i = 0; i < chain.size(); ++i) starts.push_back(i);
  } else {
    res.starts = "corners";
    int n = chain.graph().num_vertices();
    for (int v = 0; v < n; ++v) {
      Occupancy x(static_cast<std::size_t>(n), 0);
      x[static_cast<std::size_t>(v)] = chain.particles();
      starts.push_back(chain.index().rank(x));
    }
  }
  const double ptol = std::min(1e-10, 0.1 * tol);
  auto worst = [&](double t, std::size_t* arg) {
    double w = 0.0;
    for (std::size_t s : starts) {
      std::vector<double> mu(chain.size(), 0.0);
      mu[s] = 1.0;
      double tv = tv_distance(chain.propagate(mu, t, ptol), chain.stationary());
      if (tv > w) {
        w = tv;
        if (arg) *arg = s;
      }
    }
    return w;
  };
  std::size_t arg = starts.front();
  if (worst(0.0, &arg) <= eps) {
    res.t_mix = 0.0;
    res.worst_start = chain.states()[arg];
    return res;
  }
  double lo = 0.0, hi = 1.0;
  while (worst(hi, nullptr) > eps) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error("mixing time search diverged");
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (worst(mid, nullptr) > eps) lo = mid;
    else hi = mid;
  }
  res.t_mix = hi;
  worst(lo, &arg);
  res.worst_start = chain.states()[arg];
  return res;
}

std::vector<McTvPoint> mc_tv_mixing(const ExactChain& chain, const SplitParam& p, const Occupancy& x0,
                                    const std::vector<double>& times, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads, std::size_t state_limit) {
  if (chain.size() > state_limit) {
    throw StateSpaceTooLarge("Monte Carlo TV needs |states| <= " + std::to_string(state_limit));
  }
  if (times.empty() || !std::is_sorted(times.begin(), times.end())) throw InvalidArgument("times must be sorted");
  const std::size_t S = chain.size(), T = times.size();
  SplitKernel kernel(p, chain.particles());
  const WeightedGraph& g = chain.graph();
  using Hist = std::vector<std::uint64_t>;
  Hist h = replica_reduce<Hist>(
      replicas, [&] { return Hist(S * T, 0); },
      [&](Hist& acc, std::size_t r) {
        EventStream stream(g, seed, r);
        Trajectory tr = simulate_bbsp(g, kernel, x0, times.back(), stream, times);
        for (std::size_t k = 0; k < T; ++k) ++acc[k * S + chain.index().rank(tr.states[k])];
      },
      [](Hist& out, const Hist& in) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
      },
      threads);
  auto exact = exact_tv_curve(chain, chain.point_mass(x0), times);
  std::vector<McTvPoint> out;
  const double R = static_cast<double>(replicas);
  for (std::size_t k = 0; k < T; ++k) {
    McTvPoint pt;
    pt.time = times[k];
    pt.tv_exact = exact[k];
    double tv = 0.0, band = 0.0, bias = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
      double q = static_cast<double>(h[k * S + i]) / R;
      tv += std::abs(q - chain.stationary()[i]);
      double sd = std::sqrt(q * (1.0 - q) / R);
      band += sd;
      bias += std::sqrt(2.0 / std::numbers::pi) * sd;
    }
    pt.tv_hat = 0.5 * tv;
    pt.tolerance = 0.5 * 4.0 * band;
    pt.plugin_bias = 0.5 * bias;
    out.push_back(pt);
  }
  return out;
}

double wilson_f(const Occupancy& x) {
  const int n = static_cast<int>(x.size());
  const double m = total(x);
  double f = 0.0, prefix = 0.0;
  for (int k = 1; k < n; ++k) {
    prefix += x[static_cast<std::size_t>(k - 1)];
    f += std::sin(std::numbers::pi * k / n) * (prefix - m * k / n);
  }
  return f;
}

double wilson_lambda(int n) {
  if (n < 2) throw InvalidArgument("line needs n >= 2");
  return (std::cos(std::numbers::pi / n) - 1.0) / (n - 1.0);
}

double line_lower_bound(int n, int m, double s, double c_eps) {
  double nn = n;
  return nn * nn * nn / (std::numbers::pi * std::numbers::pi) *
         (std::log(nn) - std::log(1.0 + nn / m + 1.0 / s) - c_eps);
}

std::vector<double> half_profile_law(const ExactChain& chain, const SplitParam& p) {
  const int n = chain.graph().num_vertices();
  const int h = n / 2;
  // conditioned iid NegBin: weight prod_k Gamma(x_k + s) / x_k!, restricted
  // to states supported on the first h vertices
  auto lw = log_stationary_weights(chain.states(), p);
  std::vector<double> mu(chain.size(), 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& x = chain.states()[i];
    bool inside = std::all_of(x.begin() + h, x.end(), [](int c) { return c == 0; });
    if (inside) mx = std::max(mx, lw[i]);
  }
  double tot = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& x = chain.states()[i];
    bool inside = std::all_of(x.begin() + h, x.end(), [](int c) { return c == 0; });
    if (inside) {
      mu[i] = std::exp(lw[i] - mx);
      tot += mu[i];
    }
  }
  for (auto& v : mu) v /= tot;
  return mu;
}

std::vector<ChebyshevCheck> chebyshev_lower_check(const ExactChain& chain, const SplitParam& p,
                                                  const std::vector<double>& times) {
  const int n = chain.graph().num_vertices();
  const double lambda = wilson_lambda(n);
  std::vector<double> f(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) f[i] = wilson_f(chain.states()[i]);
  auto mu0 = half_profile_law(chain, p);
  double f0 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) f0 += mu0[i] * f[i];
  std::vector<ChebyshevCheck> out;
  for (double t : times) {
    auto mu = chain.propagate(mu0, t, 1e-12);
    ChebyshevCheck c;
    c.time = t;
    for (std::size_t i = 0; i < f.size(); ++i) c.mean_f += mu[i] * f[i];
    c.predicted_mean_f = std::exp(lambda * t) * f0;
    double pt = 0.0, ppi = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] >= 0.5 * c.mean_f) {
        pt += mu[i];
        ppi += chain.stationary()[i];
      }
    }
    c.bound = pt - ppi;
    c.tv = tv_distance(mu, chain.stationary());
    c.ok = c.tv >= c.bound - 1e-12;
    out.push_back(c);
  }
  return out;
}

BoundReport bound_report(const WeightedGraph& g, const SplitParam& p, int m, double eps, bool is_line, double c_eps,
                         TimeScale scale) {
  BoundReport r;
  r.a = p.a();
  r.b = p.b();
  r.s = p.s();
  r.n = g.num_vertices();
  r.m = m;
  r.eps = eps;
  r.pstar = pstar(p);
  double inv2 = 1.0 / (r.pstar * r.pstar);
  r.K = 8.0 * r.a * inv2;
  r.depink_moment_bound = 12.0 * r.a * inv2;
  r.c_s = 1.0 / (4.0 * r.K * std::log(r.depink_moment_bound));
  r.loss_c = r.pstar * r.pstar / (4.0 * r.a);
  r.upper_coeff = r.a * inv2 * std::log(r.depink_moment_bound) * std::log(static_cast<double>(r.a + r.b));
  r.max_meeting = exact_meeting_times(g, scale).max();
  r.recommended_T = 2.0 * r.max_meeting;
  r.upper_bound_over_cprime = r.upper_coeff * std::log((r.n + m) / eps) * r.max_meeting;
  if (is_line) {
    r.lower_bound = line_lower_bound(r.n, m, r.s, c_eps);
    r.lower_bound_vacuous = r.lower_bound <= 0.0;
  } else {
    r.lower_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace bbsp
