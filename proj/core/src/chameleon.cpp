#include "bbsp/chameleon.hpp"

#include <algorithm>
#include <cmath>

#include "bbsp/bbsp_sim.hpp"
#include "bbsp/error.hpp"
#include "bbsp/mabb.hpp"
#include "bbsp/rng.hpp"

namespace bbsp {

namespace {

enum Lane : std::uint64_t { kStep1 = 101, kStep2 = 102, kStep3 = 103, kStep4 = 104, kStep5 = 105 };

constexpr double kThetaSlack = 1e-12;

bool on_edge(Vertex x, const Edge& e) { return x == e.v || x == e.w; }

}  // namespace

int ChameleonState::white(Vertex v) const {
  auto i = static_cast<std::size_t>(v - 1);
  return static_cast<int>(param.colour(black[i])) - red[i] - pink[i];
}

void assign_labels(ChameleonState& st) {
  long long nl = std::min(st.total_red, st.total_white());
  st.num_labels = static_cast<int>(nl);
  std::fill(st.red_label.begin(), st.red_label.end(), 0);
  std::fill(st.white_label.begin(), st.white_label.end(), 0);
  int j = 0;
  for (Vertex v = 1; v <= st.n() && j < nl; ++v)
    for (int k = 0; k < st.red[v - 1] && j < nl; ++k) st.red_label[j++] = v;
  j = 0;
  for (Vertex v = 1; v <= st.n() && j < nl; ++v)
    for (int k = 0; k < st.white(v) && j < nl; ++k) st.white_label[j++] = v;
}

void check_invariants(const ChameleonState& st) {
  auto fail = [](const std::string& what) { throw InvariantViolation("chameleon state: " + what); };
  const int n = st.n();
  if (static_cast<int>(st.red.size()) != n || static_cast<int>(st.pink.size()) != n) fail("size mismatch");
  long long reds = 0, pinks = 0, slots = 0;
  std::vector<int> lr(static_cast<std::size_t>(n), 0), lw(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < st.num_labels; ++j) {
    Vertex r = st.red_label[static_cast<std::size_t>(j)], w = st.white_label[static_cast<std::size_t>(j)];
    if (r >= 1 && r <= n) ++lr[static_cast<std::size_t>(r - 1)];
    if (w >= 1 && w <= n) ++lw[static_cast<std::size_t>(w - 1)];
  }
  for (Vertex v = 1; v <= n; ++v) {
    std::size_t i = static_cast<std::size_t>(v - 1);
    if (st.black[i] < 0 || st.red[i] < 0 || st.pink[i] < 0) fail("negative count at vertex " + std::to_string(v));
    if (st.white(v) < 0) fail("more reds and pinks than slots at vertex " + std::to_string(v));
    if (lr[i] > st.red[i]) fail("labelled reds exceed reds at vertex " + std::to_string(v));
    if (lw[i] > st.white(v)) fail("labelled whites exceed whites at vertex " + std::to_string(v));
    reds += st.red[i];
    pinks += st.pink[i];
    slots += st.param.colour(st.black[i]);
  }
  if (reds != st.total_red || pinks != st.total_pink) fail("totals out of sync");
  if (slots != st.slots) fail("slot count changed");
  if (st.total_pink % 2 != 0) fail("odd number of pinks");
}

ChameleonState init_chameleon(const SplitParam& p, const Occupancy& black, Vertex x) {
  if (black.size() < 2) throw InvalidArgument("chameleon needs at least 2 vertices");
  if (x < 1 || x > static_cast<int>(black.size())) throw InvalidArgument("start vertex out of range");
  ChameleonState st;
  st.param = p;
  st.black = black;
  std::size_t n = black.size();
  st.red.assign(n, 0);
  st.pink.assign(n, 0);
  st.slots = static_cast<long long>(p.a()) * total(black) + static_cast<long long>(p.b()) * static_cast<long long>(n);
  st.red[static_cast<std::size_t>(x - 1)] = static_cast<int>(p.colour(black[static_cast<std::size_t>(x - 1)]));
  st.total_red = st.red[static_cast<std::size_t>(x - 1)];
  st.red_label.assign(static_cast<std::size_t>(st.slots), 0);
  st.white_label.assign(static_cast<std::size_t>(st.slots), 0);
  assign_labels(st);
  return st;
}

double solve_theta(const PlacementBounds& b, double m_star) {
  // integer form of the denominator: 2u + uP - 2l - lP
  long long den2 = 2 * b.u_v + b.up_v - 2 * b.l_v - b.lp_v;
  if (den2 == 0) return 0.5;
  double num = static_cast<double>(b.u_v) + 0.5 * static_cast<double>(b.up_v) - m_star;
  double theta = num / (0.5 * static_cast<double>(den2));
  if (theta < -kThetaSlack || theta > 1.0 + kThetaSlack) {
    throw InvariantViolation("theta out of range: " + std::to_string(theta));
  }
  return std::clamp(theta, 0.0, 1.0);
}

PlacementBounds placement_bounds(const SplitParam& p, int bv, int bw, int bv_new, long long reds, long long pinks) {
  PlacementBounds b;
  int N = bv + bw;
  b.cap_v = p.colour(bv_new);
  b.cap_w = p.colour(N - bv_new);
  b.reds = reds;
  b.pinks = pinks;
  b.l_v = std::max(reds - b.cap_w, 0LL);
  b.u_v = std::min(b.cap_v, reds);
  b.u_w = reds - b.l_v;
  b.l_w = reds - b.u_v;
  b.lp_v = std::max(pinks - b.cap_w + b.u_w, 0LL);
  b.up_v = std::min(b.cap_v - b.u_v, pinks);
  b.lp_w = pinks - b.up_v;
  b.up_w = pinks - b.lp_v;
  b.stay_v = marked_stay_prob(p, N, bv_new);
  b.m_star_v = (static_cast<double>(reds) + 0.5 * static_cast<double>(pinks)) * b.stay_v;
  b.theta_v = solve_theta(b, b.m_star_v);
  return b;
}

long long depink_delta(long long ink, long long slots) {
  long long r = std::min(ink, slots - ink);
  return (r + 2) / 3;
}

void chameleon_step(const WeightedGraph& g, const SplitKernel& kernel, ChameleonState& st, const Event& ev,
                    ChameleonMode mode, StepTrace* trace) {
  const Edge& e = g.edge(ev.edge);
  auto iv = static_cast<std::size_t>(e.v - 1), iw = static_cast<std::size_t>(e.w - 1);
  const int bv = st.black[iv], bw = st.black[iw];
  const int N = bv + bw;
  const int kv = kernel.sample(N, ev.ub);
  const long long R = st.red[iv] + st.red[iw];
  const long long P = st.pink[iv] + st.pink[iw];
  const long long W_edge = st.white(e.v) + st.white(e.w);
  const long long gR = st.total_red, gP = st.total_pink, gW = st.total_white();

  PlacementBounds b = placement_bounds(st.param, bv, bw, kv, R, P);
  StepTrace local;
  StepTrace& tr = trace ? *trace : local;
  tr = StepTrace{};
  tr.bounds = b;
  tr.had_reds = R > 0;

  // tokens: label index, or -1 for an unlabelled particle
  std::vector<int> nonpaired, paired, whites;
  long long lab_red = 0, lab_white = 0;
  for (int j = 0; j < st.num_labels; ++j) {
    bool r_on = on_edge(st.red_label[static_cast<std::size_t>(j)], e);
    bool w_on = on_edge(st.white_label[static_cast<std::size_t>(j)], e);
    if (r_on) {
      ++lab_red;
      (w_on ? paired : nonpaired).push_back(j);
    }
    if (w_on) {
      ++lab_white;
      whites.push_back(j);
    }
  }
  nonpaired.insert(nonpaired.end(), static_cast<std::size_t>(R - lab_red), -1);
  whites.insert(whites.end(), static_cast<std::size_t>(W_edge - lab_white), -1);
  tr.paired_before = static_cast<int>(paired.size());

  CounterRng r1(derive_key({ev.uc_bits, kStep1})), r2(derive_key({ev.uc_bits, kStep2})),
      r3(derive_key({ev.uc_bits, kStep3})), r4(derive_key({ev.uc_bits, kStep4})),
      r5(derive_key({ev.uc_bits, kStep5}));

  std::vector<int> to_v, to_w;  // red tokens
  long long pinkened = 0;
  std::vector<int> pink_pairs;
  long long old_pinks_v = 0;

  if (R == 0) {
    old_pinks_v = r4.bernoulli(b.theta_v) ? b.lp_v : b.up_v;
  } else {
    // Step 1: lower bounds, unpaired reds first
    long long need = b.l_v + b.l_w;
    r1.shuffle(nonpaired);
    std::vector<int> chosen;
    std::size_t take = static_cast<std::size_t>(std::min<long long>(need, static_cast<long long>(nonpaired.size())));
    chosen.assign(nonpaired.begin(), nonpaired.begin() + static_cast<std::ptrdiff_t>(take));
    nonpaired.erase(nonpaired.begin(), nonpaired.begin() + static_cast<std::ptrdiff_t>(take));
    if (static_cast<long long>(chosen.size()) < need) {
      r1.shuffle(paired);
      auto more = static_cast<std::size_t>(need - static_cast<long long>(chosen.size()));
      chosen.insert(chosen.end(), paired.begin(), paired.begin() + static_cast<std::ptrdiff_t>(more));
      paired.erase(paired.begin(), paired.begin() + static_cast<std::ptrdiff_t>(more));
    }
    r1.shuffle(chosen);
    to_v.assign(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(b.l_v));
    to_w.assign(chosen.begin() + static_cast<std::ptrdiff_t>(b.l_v), chosen.end());
    tr.paired_in_pile = static_cast<int>(paired.size());

    // Step 2
    double pa = 2.0 * std::min(b.theta_v, 1.0 - b.theta_v);
    tr.branch_a = r2.uniform() < pa;
    const long long free_reds = static_cast<long long>(nonpaired.size() + paired.size());

    if (tr.branch_a) {
      // Step 3a
      long long k = static_cast<long long>(paired.size());
      long long c = k;
      if (mode == ChameleonMode::Standard) {
        long long cap = (std::min(gR, gW) + gP / 2 + 2) / 3 - gP / 2;
        c = std::clamp(cap, 0LL, k);
      }
      r3.shuffle(paired);
      pink_pairs.assign(paired.begin(), paired.begin() + static_cast<std::ptrdiff_t>(c));
      pinkened = c;
      std::vector<int> pile(nonpaired);
      pile.insert(pile.end(), paired.begin() + static_cast<std::ptrdiff_t>(c), paired.end());
      long long X = 0;
      for (int tok : pile) {
        if (r3.uniform() < 0.5) {
          to_v.push_back(tok);
          ++X;
        } else {
          to_w.push_back(tok);
        }
      }
      // Step 4 (coin branch): place old pinks inside the feasible window for
      // this X with mean equal to the midpoint of lP and uP.
      long long nfree = free_reds - c;
      auto lo_of = [&](long long x) {
        long long yw = b.l_w + (nfree - x) + c;
        return std::max(P - (b.cap_w - yw), 0LL);
      };
      auto hi_of = [&](long long x) {
        long long yv = b.l_v + x + c;
        return std::min(b.cap_v - yv, P);
      };
      double elo = 0.0, ehi = 0.0;
      for (long long x = 0; x <= nfree; ++x) {
        double w = std::exp(std::lgamma(nfree + 1.0) - std::lgamma(x + 1.0) - std::lgamma(nfree - x + 1.0) -
                            static_cast<double>(nfree) * std::log(2.0));
        elo += w * static_cast<double>(lo_of(x));
        ehi += w * static_cast<double>(hi_of(x));
      }
      double target = 0.5 * static_cast<double>(b.lp_v + b.up_v);
      double lambda = ehi > elo ? std::clamp((target - elo) / (ehi - elo), 0.0, 1.0) : 0.0;
      long long lo = lo_of(X), hi = hi_of(X);
      if (lo > hi) throw InvariantViolation("no room for pink particles on the ringing edge");
      double mu = static_cast<double>(lo) + lambda * static_cast<double>(hi - lo);
      double fl = std::floor(mu);
      old_pinks_v = static_cast<long long>(fl) + (r4.uniform() < mu - fl ? 1 : 0);
      old_pinks_v = std::clamp(old_pinks_v, lo, hi);
    } else {
      // Step 3b, with the old pinks following the reds
      bool reds_up = b.theta_v < 0.5;
      auto& dst = reds_up ? to_v : to_w;
      dst.insert(dst.end(), nonpaired.begin(), nonpaired.end());
      dst.insert(dst.end(), paired.begin(), paired.end());
      old_pinks_v = reds_up ? b.up_v : b.lp_v;
    }
  }

  // apply the red / pink placement
  for (int tok : to_v)
    if (tok >= 0) st.red_label[static_cast<std::size_t>(tok)] = e.v;
  for (int tok : to_w)
    if (tok >= 0) st.red_label[static_cast<std::size_t>(tok)] = e.w;
  for (int j : pink_pairs) {
    st.red_label[static_cast<std::size_t>(j)] = 0;
    st.white_label[static_cast<std::size_t>(j)] = 0;
  }
  if (!pink_pairs.empty()) {
    std::vector<char> gone(static_cast<std::size_t>(st.num_labels), 0);
    for (int j : pink_pairs) gone[static_cast<std::size_t>(j)] = 1;
    std::erase_if(whites, [&](int tok) { return tok >= 0 && gone[static_cast<std::size_t>(tok)]; });
  }
  st.black[iv] = kv;
  st.black[iw] = N - kv;
  st.red[iv] = static_cast<int>(to_v.size());
  st.red[iw] = static_cast<int>(to_w.size());
  st.pink[iv] = static_cast<int>(pinkened + old_pinks_v);
  st.pink[iw] = static_cast<int>(pinkened + (P - old_pinks_v));
  st.total_red -= pinkened;
  st.total_pink += 2 * pinkened;

  // Step 5: whites fill the remaining slots
  long long nv = b.cap_v - st.red[iv] - st.pink[iv];
  long long nw = b.cap_w - st.red[iw] - st.pink[iw];
  if (nv < 0 || nw < 0 || nv + nw != static_cast<long long>(whites.size())) {
    throw InvariantViolation("white placement infeasible on edge {" + std::to_string(e.v) + "," +
                             std::to_string(e.w) + "}");
  }
  r5.shuffle(whites);
  for (std::size_t i = 0; i < whites.size(); ++i) {
    int tok = whites[i];
    if (tok >= 0) st.white_label[static_cast<std::size_t>(tok)] = static_cast<long long>(i) < nv ? e.v : e.w;
  }
  tr.pinkened = static_cast<int>(pinkened);
  tr.old_pinks_on_v = static_cast<int>(old_pinks_v);
  tr.reds_to_v = static_cast<int>(to_v.size());
}

ChameleonRun run_chameleon(const WeightedGraph& g, const SplitKernel& kernel, const ChameleonState& init,
                           EventStream& stream, const ChameleonConfig& cfg, const ChameleonObserver& observer) {
  if (!(cfg.round_length > 0.0)) throw InvalidArgument("round length must be positive");
  if (!std::is_sorted(cfg.sample_times.begin(), cfg.sample_times.end())) {
    throw InvalidArgument("sample times must be sorted");
  }
  validate_occupancy(g, init.black);
  if (total(init.black) > kernel.max_total()) throw InvalidArgument("kernel capacity below particle count");
  ChameleonRun run;
  ChameleonState st = init;
  std::uint64_t round = 1;
  RoundRecord cur;
  auto open_round = [&](std::uint64_t i) {
    cur = RoundRecord{};
    cur.round = i;
    cur.red_start = st.total_red;
    cur.white_start = st.total_white();
    cur.pink_start = st.total_pink;
  };
  open_round(1);
  std::size_t si = 0;
  auto take_samples = [&](double upto, bool inclusive) {
    while (si < cfg.sample_times.size() &&
           (inclusive ? cfg.sample_times[si] <= upto : cfg.sample_times[si] < upto)) {
      run.samples.push_back(st);
      ++si;
    }
  };
  auto absorbed_now = [&](double t) {
    if (!run.absorbed && st.absorbed()) {
      run.absorbed = true;
      run.fill = st.ink2() == 2 * st.slots;
      run.absorption_time = t;
    }
  };
  absorbed_now(0.0);

  double t_now = 0.0;
  for (;;) {
    if (run.absorbed && cfg.stop_on_absorption) break;
    const double t_ev = stream.peek().time;
    double t_round = static_cast<double>(round) * cfg.round_length;
    if (t_round <= t_ev && t_round <= cfg.t_end) {
      // boundary first on ties
      take_samples(t_round, false);
      t_now = t_round;
      cur.red_end = st.total_red;
      cur.white_end = st.total_white();
      cur.pink_end = st.total_pink;
      if (st.total_pink > 0 && st.total_pink >= std::min(st.total_red, st.total_white())) {
        DepinkRecord d;
        d.time = t_round;
        d.round = round;
        d.ink_before = st.total_ink();
        d.up = stream.round_coin(round);
        for (int v = 0; v < st.n(); ++v) {
          auto i = static_cast<std::size_t>(v);
          if (d.up) st.red[i] += st.pink[i];
          st.pink[i] = 0;
        }
        if (d.up) st.total_red += st.total_pink;
        st.total_pink = 0;
        d.ink_after = st.total_ink();
        run.depinks.push_back(d);
        cur.depinked = true;
      }
      if (cfg.record_rounds) run.rounds.push_back(cur);
      assign_labels(st);
      ++round;
      open_round(round);
      if (observer) observer(t_round, st, ChameleonPoint::RoundEnd, nullptr);
      absorbed_now(t_round);
      continue;
    }
    if (t_ev > cfg.t_end) break;
    take_samples(t_ev, false);
    Event ev = stream.next();
    StepTrace trace;
    chameleon_step(g, kernel, st, ev, cfg.mode, observer ? &trace : nullptr);
    ++run.events;
    t_now = ev.time;
    if (observer) observer(ev.time, st, ChameleonPoint::Event, &trace);
  }
  take_samples(1e308, true);
  run.final_state = std::move(st);
  run.final_time = std::max(t_now, run.absorbed && cfg.stop_on_absorption ? run.absorption_time : cfg.t_end);
  return run;
}

}  // namespace bbsp
