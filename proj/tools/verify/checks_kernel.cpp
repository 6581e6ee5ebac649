#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "bbsp/bbsp.hpp"
#include "checks.hpp"

namespace bbsp::verify {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Exact BetaBin(N, s, s) pmf for rational s = b/a:
// C(N,k) prod_{i<k}(s+i) prod_{i<N-k}(s+i) / prod_{i<N}(2s+i).
std::vector<Rational> rational_pmf(int N, const SplitParam& p) {
  Rational s(p.b(), p.a());
  std::vector<Rational> rise(static_cast<std::size_t>(N) + 1, Rational(1));
  for (int i = 1; i <= N; ++i) rise[i] = rise[i - 1] * (s + (i - 1));
  Rational den(1);
  for (int i = 0; i < N; ++i) den *= 2 * s + i;
  std::vector<Rational> out;
  Rational binom(1);
  for (int k = 0; k <= N; ++k) {
    out.push_back(binom * rise[k] * rise[N - k] / den);
    binom = binom * (N - k) / (k + 1);
  }
  return out;
}

WeightedGraph weighted_graph(int n) {
  if (n == 2) return WeightedGraph(2, {{1, 2, 0.7}});
  return WeightedGraph(3, {{1, 2, 1.0}, {2, 3, 2.5}, {1, 3, 0.4}});
}

CheckResult detailed_balance(const Ctx&) {
  double worst = 0.0;
  long long cases = 0;
  for (const auto& p : s_grid()) {
    for (auto [n, m] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
      auto g = weighted_graph(n);
      auto states = enumerate_states(n, m);
      auto pi = stationary_dist(states, p);
      StateIndex idx(n, m);
      SplitKernel k(p, m);
      for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& x = states[i];
        for (const auto& e : g.edges()) {
          int bv = x[e.v - 1], bw = x[e.w - 1], N = bv + bw;
          for (int kv = 0; kv <= N; ++kv) {
            Occupancy y = x;
            y[e.v - 1] = kv;
            y[e.w - 1] = N - kv;
            double fwd = pi[i] * edge_transition_prob(k, bv, bw, kv, N - kv);
            double back = pi[idx.rank(y)] * edge_transition_prob(k, kv, N - kv, bv, bw);
            worst = std::max(worst, std::abs(fwd - back));
            ++cases;
          }
        }
      }
    }
  }
  return max_error_result("1a", "stationary law is reversible for every edge kernel", worst, 1e-10,
                          std::to_string(cases) + " transitions, (n,m) in {(2,2),(2,3),(3,3)}");
}

CheckResult heat_kernel(const Ctx&) {
  double worst = 0.0, oracle = 0.0, sym = 0.0;
  bool exact_ok = true;
  for (const auto& p : s_grid()) {
    SplitKernel k(p, 13);
    for (int N = 0; N <= 12; ++N) {
      auto exact = rational_pmf(N, p);
      for (int j = 0; j <= N; ++j) {
        oracle = std::max(oracle, std::abs(k.prob(N, j) - static_cast<double>(exact[j])));
        sym = std::max(sym, std::abs(k.prob(N, j) - k.prob(N, N - j)));
      }
    }
    for (int N = 0; N <= 8; ++N) {
      auto big = rational_pmf(N + 1, p), small = rational_pmf(N, p);
      for (int j = 0; j <= N; ++j) {
        double lhs = (j + 1) * k.prob(N + 1, j + 1) + (N - j + 1) * k.prob(N + 1, j);
        worst = std::max(worst, std::abs(lhs - (N + 1) * k.prob(N, j)));
        Rational elhs = Rational(j + 1) * big[j + 1] + Rational(N - j + 1) * big[j];
        exact_ok &= elhs == Rational(N + 1) * small[j];
      }
    }
  }
  auto r = max_error_result("1b", "adding a particle to an edge matches the smaller kernel", std::max(worst, sym), 1e-12,
                            "identity " + fmtd(worst) + ", symmetry up to N=12 " + fmtd(sym) + ", vs rational pmf " +
                                fmtd(oracle) + ", rational identity " + (exact_ok ? "exact" : "BROKEN"));
  r.pass = r.pass && exact_ok && oracle <= 1e-12;
  return r;
}

CheckResult colour_flow(const Ctx&) {
  double worst = 0.0;
  long long cases = 0;
  for (const auto& p : s_grid()) {
    SplitKernel k(p, 10);
    for (int N = 0; N <= 8; ++N)
      for (int bv = 0; bv <= N; ++bv)
        for (int kv = 0; kv <= N; ++kv) {
          double vv = marked_placement_prob(k, bv, N - bv, kv, true, true);
          double wv = marked_placement_prob(k, bv, N - bv, kv, false, true);
          double lhs = static_cast<double>(p.colour(bv)) * vv + static_cast<double>(p.colour(N - bv)) * wv;
          worst = std::max(worst, std::abs(lhs - static_cast<double>(p.colour(kv))));
          ++cases;
        }
  }
  return max_error_result("1c", "marked placement carries colour slots exactly", worst, 1e-12,
                          std::to_string(cases) + " (B, B') pairs");
}

CheckResult theta_bounds(const Ctx&) {
  long long violations = 0, cases = 0;
  for (const auto& p : s_grid()) {
    for (int N = 0; N <= 6; ++N)
      for (int bv = 0; bv <= N; ++bv)
        for (int kv = 0; kv <= N; ++kv) {
          long long slots = p.colour(bv) + p.colour(N - bv);
          double stay = marked_stay_prob(p, N, kv);
          double eta = std::min(stay, 1 - stay);
          for (long long R = 0; R <= slots; ++R)
            for (long long P = 0; R + P <= slots; ++P) {
              ++cases;
              auto b = placement_bounds(p, bv, N - bv, kv, R, P);
              double lo = b.l_v + 0.5 * b.lp_v, hi = b.u_v + 0.5 * b.up_v;
              bool bad = lo > b.m_star_v + 1e-12 || hi < b.m_star_v - 1e-12;
              bad |= b.theta_v < -1e-12 || b.theta_v > 1 + 1e-12;
              if (hi > lo) {
                bad |= std::abs(b.theta_v * lo + (1 - b.theta_v) * hi - b.m_star_v) > 1e-12;
                bad |= b.theta_v < eta - 1e-12 || b.theta_v > 1 - eta + 1e-12;
              }
              violations += bad;
            }
        }
  }
  return violation_result("1d", "theta exists in [eta, 1-eta] and sandwiches m*", violations, cases,
                          "edge totals <= 6");
}

CheckResult contraction(const Ctx&) {
  double worst = 0.0;
  long long cases = 0;
  for (const auto& p : s_grid()) {
    SplitKernel k(p, 10);
    for (int N = 0; N <= 8; ++N)
      for (int bv = 0; bv <= N; ++bv)
        for (bool mark_v : {true, false})
          for (int fv_new = 0; fv_new <= N + 1; ++fv_new) {
            double plain = k.prob(N + 1, fv_new);
            double marked = 0.0;
            if (fv_new >= 1) marked += k.prob(N, fv_new - 1) * marked_placement_prob(k, bv, N - bv, fv_new - 1, mark_v, true);
            if (fv_new <= N) marked += k.prob(N, fv_new) * marked_placement_prob(k, bv, N - bv, fv_new, mark_v, false);
            worst = std::max(worst, std::abs(plain - marked));
            ++cases;
          }
  }
  return max_error_result("1e", "forgetting the mark gives the plain transition", worst, 1e-12,
                          std::to_string(cases) + " transitions");
}

CheckResult paired_reds(const Ctx& ctx) {
  const std::size_t target = ctx.count(100'000, 20'000);
  const auto g = make_cycle(4);
  CounterRng rng(derive_key({0x1f, 7}));
  long long violations = 0;
  std::size_t done = 0;
  std::vector<SplitKernel> kernels;
  for (const auto& p : s_grid()) kernels.emplace_back(p, 10);
  for (std::uint64_t draw = 0; done < target; ++draw) {
    const std::size_t pi = rng.below(s_grid().size());
    const auto& p = s_grid()[pi];
    Occupancy black(4, 0);
    int m1 = static_cast<int>(rng.below(7));
    for (int i = 0; i < m1; ++i) ++black[rng.below(4)];
    auto st = init_chameleon(p, black, 1);
    // random reds and pink pairs within the slots
    st.red.assign(4, 0);
    st.pink.assign(4, 0);
    for (int v = 0; v < 4; ++v) st.red[v] = static_cast<int>(rng.below(static_cast<std::uint64_t>(p.colour(black[v])) + 1));
    for (int pairs = static_cast<int>(rng.below(3)); pairs > 0; --pairs) {
      int v = static_cast<int>(rng.below(4)), w = static_cast<int>(rng.below(4));
      if (v == w) continue;
      if (st.red[v] + st.pink[v] < p.colour(black[v]) && st.red[w] + st.pink[w] < p.colour(black[w])) {
        ++st.pink[v];
        ++st.pink[w];
      }
    }
    st.total_red = st.red[0] + st.red[1] + st.red[2] + st.red[3];
    st.total_pink = st.pink[0] + st.pink[1] + st.pink[2] + st.pink[3];
    if (st.total_red == 0) continue;
    assign_labels(st);
    Event ev;
    ev.edge = rng.below(g.num_edges());
    ev.ub = rng.uniform();
    ev.uc_bits = rng.next();
    StepTrace tr;
    chameleon_step(g, kernels[pi], st, ev, ChameleonMode::Standard, &tr);
    if (!tr.had_reds) continue;
    ++done;
    long long bound = std::min<long long>({tr.paired_before, tr.bounds.cap_v, tr.bounds.cap_w});
    violations += tr.paired_in_pile < bound;
  }
  return violation_result("1f", "paired reds survive the lower-limit placement", violations,
                          static_cast<long long>(done), "randomized edge steps on C_4");
}

CheckResult distributional(const Ctx&) {
  double worst = 0.0;
  std::string notes;
  bool ok = true;
  for (const auto& p : s_grid()) {
    SplitKernel k(p, 64);
    // one particle: fair coin, exactly
    ok &= k.prob(1, 0) == 0.5 && k.prob(1, 1) == 0.5;
    if (p == SplitParam(1, 1))
      for (int j = 0; j <= 2; ++j) worst = std::max(worst, std::abs(k.prob(2, j) - 1.0 / 3.0));
    double ps = pstar(p);
    for (int N = 2; N <= 64; ++N) {
      if (near_even_mass(N, p.s()) < ps) {
        ok = false;
        notes += " near-even mass below p* at N=" + std::to_string(N) + " s=" + p.str();
      }
    }
    double merge = k.prob(2, 0) + k.prob(2, 2);
    worst = std::max(worst, std::abs(merge - (1.0 - p.s() / (1.0 + 2.0 * p.s()))));
    if (merge < 2 * ps) {
      ok = false;
      notes += " merge below 2p* s=" + p.str();
    }
  }
  auto r = max_error_result("2", "split law: fair single coin, uniform pair, near-even mass, merging", worst, 1e-12,
                            ok ? "exact coin, near-even mass >= p* for 2<=N<=64, merge >= 2p*" : notes);
  r.pass = r.pass && ok;
  return r;
}

}  // namespace

std::vector<CheckEntry> kernel_checks() {
  return {{"1a", detailed_balance}, {"1b", heat_kernel}, {"1c", colour_flow}, {"1d", theta_bounds},
          {"1e", contraction},      {"1f", paired_reds}, {"2", distributional}};
}

}  // namespace bbsp::verify
