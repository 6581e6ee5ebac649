#include "bbsp_tools/experiments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bbsp/bbsp.hpp"

namespace bbsp::tools {

namespace {

using nlohmann::json;

std::string fmt(double x) { return format_double(x); }

json header(const ExperimentConfig& cfg) {
  json j;
  j["version"] = version_string();
  j["config_hash"] = cfg.hash_hex();
  j["config"] = cfg.to_text();
  return j;
}

std::vector<double> default_times(double t_end, int count = 10) {
  std::vector<double> t;
  for (int i = 1; i <= count; ++i) t.push_back(t_end * i / count);
  return t;
}

Occupancy initial(const ExperimentConfig& cfg, int n, int particles) {
  if (cfg.init.empty()) {
    Occupancy x(static_cast<std::size_t>(n), 0);
    x[0] = particles;
    return x;
  }
  Occupancy x(cfg.init.begin(), cfg.init.end());
  if (static_cast<int>(x.size()) != n) throw InvalidArgument("init has the wrong number of vertices");
  if (total(x) != particles) {
    throw InvalidArgument("init holds " + std::to_string(total(x)) + " particles, expected " + std::to_string(particles));
  }
  return x;
}

std::string occupancy_text(const Occupancy& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + std::to_string(x[i]);
  return s;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentOutput run_simulate(const ExperimentConfig& cfg, unsigned threads) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  const int n = g.num_vertices();
  Occupancy x0 = initial(cfg, n, cfg.m);
  auto times = cfg.times.empty() ? default_times(cfg.t_end) : cfg.times;
  SplitKernel k(p, cfg.m);
  ExperimentOutput out;
  out.json = header(cfg);
  std::ostringstream csv;
  csv << "time";
  if (cfg.replicas == 1) {
    for (int v = 1; v <= n; ++v) csv << ",x" << v;
    csv << "\n";
    EventStream s(g, cfg.seed, 0, cfg.scale());
    auto tr = simulate_bbsp(g, k, x0, std::max(cfg.t_end, times.back()), s, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      csv << fmt(times[i]);
      for (int c : tr.states[i]) csv << "," << c;
      csv << "\n";
    }
    out.json["events"] = tr.events;
    out.json["final_state"] = tr.final_state;
  } else {
    for (int v = 1; v <= n; ++v) csv << ",mean_x" << v;
    csv << "\n";
    using Acc = std::vector<double>;
    const std::size_t T = times.size();
    Acc acc = replica_reduce<Acc>(
        cfg.replicas, [&] { return Acc(T * n, 0.0); },
        [&](Acc& a, std::size_t r) {
          EventStream s(g, cfg.seed, r, cfg.scale());
          auto tr = simulate_bbsp(g, k, x0, times.back(), s, times);
          for (std::size_t i = 0; i < T; ++i)
            for (int v = 0; v < n; ++v) a[i * n + v] += tr.states[i][v];
        },
        [](Acc& o, const Acc& in) {
          for (std::size_t i = 0; i < o.size(); ++i) o[i] += in[i];
        },
        threads);
    for (std::size_t i = 0; i < T; ++i) {
      csv << fmt(times[i]);
      for (int v = 0; v < n; ++v) csv << "," << fmt(acc[i * n + v] / static_cast<double>(cfg.replicas));
      csv << "\n";
    }
  }
  out.json["replicas"] = cfg.replicas;
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_mabb(const ExperimentConfig& cfg) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  const int n = g.num_vertices();
  if (cfg.m < 1) throw InvalidArgument("need m >= 1");
  Occupancy x0 = initial(cfg, n, cfg.m - 1);
  SplitKernel k(p, cfg.m + 1);
  EventStream s(g, cfg.seed, 0, cfg.scale());
  std::ostringstream csv;
  csv << "time,marked_vertex,state_hash\n";
  MarkedState st{x0, cfg.marked};
  csv << fmt(0.0) << "," << st.marked << "," << hex64(occupancy_hash(st.nonmarked)) << "\n";
  MarkedTrajectory tr;
  if (cfg.times.empty()) {
    tr = simulate_mabb(g, k, st, cfg.t_end, s, {}, [&](const Event& ev, const MarkedState& x) {
      csv << fmt(ev.time) << "," << x.marked << "," << hex64(occupancy_hash(x.nonmarked)) << "\n";
    });
  } else {
    tr = simulate_mabb(g, k, st, std::max(cfg.t_end, cfg.times.back()), s, cfg.times);
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
      csv << fmt(cfg.times[i]) << "," << tr.states[i].marked << "," << hex64(occupancy_hash(tr.states[i].nonmarked))
          << "\n";
    }
  }
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["events"] = tr.events;
  out.json["final_nonmarked"] = tr.final_state.nonmarked;
  out.json["final_marked"] = tr.final_state.marked;
  out.json["conditional_law_of_mark"] = marked_conditional(p, tr.final_state.nonmarked);
  out.csv = csv.str();
  return out;
}

double round_length_of(const ExperimentConfig& cfg, const WeightedGraph& g) {
  if (cfg.round_length == "auto") return recommended_round_length(g, cfg.scale());
  return std::stod(cfg.round_length);
}

ExperimentOutput run_cham(const ExperimentConfig& cfg, unsigned threads) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  const int n = g.num_vertices();
  if (cfg.m < 1) throw InvalidArgument("need m >= 1");
  Occupancy x0 = initial(cfg, n, cfg.m - 1);
  SplitKernel k(p, cfg.m + 1);
  const double T = round_length_of(cfg, g);
  auto st0 = init_chameleon(p, x0, cfg.marked);
  ChameleonConfig cc;
  cc.round_length = T;
  cc.mode = cfg.mode == "modified" ? ChameleonMode::Modified : ChameleonMode::Standard;
  cc.t_end = cfg.t_end;
  const double expected_fill = static_cast<double>(st0.total_red) / static_cast<double>(st0.slots);
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["round_length"] = T;
  out.json["slots"] = st0.slots;
  out.json["expected_fill_probability"] = expected_fill;
  std::ostringstream csv;
  if (cfg.replicas == 1) {
    csv << "time,total_ink,n_red,n_pink,depink_index\n";
    std::size_t depinks = 0;
    auto row = [&](double t, const ChameleonState& x) {
      csv << fmt(t) << "," << fmt(x.total_ink()) << "," << x.total_red << "," << x.total_pink << "," << depinks << "\n";
    };
    row(0.0, st0);
    const bool full = cfg.record == "full";
    EventStream s(g, cfg.seed, 0, cfg.scale());
    // ink moves only at depinkings
    long long last_ink2 = st0.ink2();
    auto run = run_chameleon(g, k, st0, s, cc, [&](double t, const ChameleonState& x, ChameleonPoint pt, const StepTrace*) {
      if (pt == ChameleonPoint::RoundEnd) {
        if (x.ink2() != last_ink2) ++depinks;
        row(t, x);
      } else if (full) {
        row(t, x);
      }
      last_ink2 = x.ink2();
    });
    json dp = json::array();
    for (const auto& d : run.depinks) dp.push_back({{"time", d.time}, {"round", d.round}, {"ink_before", d.ink_before}, {"ink_after", d.ink_after}});
    out.json["absorbed"] = run.absorbed;
    out.json["fill"] = run.fill;
    out.json["absorption_time"] = run.absorbed ? json(run.absorption_time) : json(nullptr);
    out.json["depinkings"] = dp;
    out.json["events"] = run.events;
    out.json["final_ink"] = run.final_state.total_ink();
  } else {
    struct Row {
      bool absorbed, fill;
      double time;
      std::size_t depinks;
    };
    using Acc = std::vector<std::pair<std::size_t, Row>>;
    Acc rows = replica_reduce<Acc>(
        cfg.replicas, [] { return Acc{}; },
        [&](Acc& a, std::size_t r) {
          EventStream s(g, cfg.seed, r, cfg.scale());
          auto run = run_chameleon(g, k, st0, s, cc);
          a.push_back({r, Row{run.absorbed, run.fill, run.absorption_time, run.depinks.size()}});
        },
        [](Acc& o, const Acc& in) { o.insert(o.end(), in.begin(), in.end()); }, threads);
    csv << "replica,absorbed,fill,absorption_time,depinkings\n";
    double fills = 0, absorbed = 0, tsum = 0;
    for (const auto& [r, row] : rows) {
      csv << r << "," << row.absorbed << "," << row.fill << "," << (row.absorbed ? fmt(row.time) : "") << ","
          << row.depinks << "\n";
      fills += row.fill;
      absorbed += row.absorbed;
      if (row.absorbed) tsum += row.time;
    }
    // fill is only decided for absorbed runs; raise t_end if many are not
    double R = static_cast<double>(cfg.replicas);
    double f = absorbed > 0 ? fills / absorbed : 0.0;
    out.json["fill_fraction"] = absorbed > 0 ? json(f) : json(nullptr);
    out.json["fill_stderr"] = absorbed > 0 ? json(std::sqrt(f * (1 - f) / absorbed)) : json(nullptr);
    out.json["absorbed_fraction"] = absorbed / R;
    out.json["mean_absorption_time"] = absorbed > 0 ? json(tsum / absorbed) : json(nullptr);
  }
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_meet(const ExperimentConfig& cfg, unsigned threads) {
  auto g = cfg.make_graph();
  auto t = exact_meeting_times(g, cfg.scale());
  const int n = g.num_vertices();
  std::ostringstream csv;
  csv << "i,j,expected_meeting_time\n";
  int bi = 1, bj = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      csv << i << "," << j << "," << fmt(t.at(i, j)) << "\n";
      if (t.at(i, j) > t.at(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["max_meeting_time"] = t.max();
  out.json["argmax"] = {bi, bj};
  out.json["recommended_round_length"] = 2.0 * t.max();
  out.json["tau0"] = tau0(g, cfg.scale());
  if (cfg.replicas > 1) {
    auto est = mc_meeting_time(g, bi, bj, cfg.seed, cfg.replicas, cfg.scale(), threads);
    out.json["mc_mean"] = est.mean;
    out.json["mc_stderr"] = est.stderr_;
  }
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_mix_exact(const ExperimentConfig& cfg) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  ExactChain chain(g, p, cfg.m, cfg.scale());
  Occupancy x0 = initial(cfg, g.num_vertices(), cfg.m);
  auto times = cfg.times.empty() ? default_times(cfg.t_end, 50) : cfg.times;
  auto tv = exact_tv_curve(chain, chain.point_mass(x0), times);
  std::ostringstream csv;
  csv << "time,tv\n";
  for (std::size_t i = 0; i < times.size(); ++i) csv << fmt(times[i]) << "," << fmt(tv[i]) << "\n";
  auto mix = exact_mixing_time(chain, cfg.eps);
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["states"] = chain.size();
  out.json["eps"] = cfg.eps;
  out.json["t_mix"] = mix.t_mix;
  out.json["worst_start"] = mix.worst_start;
  out.json["starts_considered"] = mix.starts;
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_mix_mc(const ExperimentConfig& cfg, unsigned threads) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  ExactChain chain(g, p, cfg.m, cfg.scale());
  if (cfg.scale() == TimeScale::Raw) throw InvalidArgument("mix-mc runs in canonical time only");
  Occupancy x0 = initial(cfg, g.num_vertices(), cfg.m);
  auto times = cfg.times.empty() ? default_times(cfg.t_end) : cfg.times;
  auto pts = mc_tv_mixing(chain, p, x0, times, cfg.replicas, cfg.seed, threads);
  std::ostringstream csv;
  csv << "time,tv_hat,tv_exact,tolerance_4sigma,plugin_bias\n";
  double t_hat = std::nan("");
  for (const auto& pt : pts) {
    csv << fmt(pt.time) << "," << fmt(pt.tv_hat) << "," << fmt(pt.tv_exact) << "," << fmt(pt.tolerance) << ","
        << fmt(pt.plugin_bias) << "\n";
    if (std::isnan(t_hat) && pt.tv_hat <= cfg.eps) t_hat = pt.time;
  }
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["states"] = chain.size();
  out.json["first_time_below_eps"] = std::isnan(t_hat) ? json(nullptr) : json(t_hat);
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_lower_bound(const ExperimentConfig& cfg) {
  if (cfg.graph != "line") throw InvalidArgument("lower-bound applies to the line graph");
  auto g = cfg.make_graph();
  auto p = cfg.param();
  const int n = g.num_vertices();
  ExperimentOutput out;
  out.json = header(cfg);
  double lb = line_lower_bound(n, cfg.m, p.s(), cfg.c_eps);
  out.json["lower_bound"] = lb;
  out.json["vacuous"] = lb <= 0.0;
  out.json["lambda"] = wilson_lambda(n);
  out.json["c_eps"] = cfg.c_eps;
  std::ostringstream csv;
  csv << "time,tv,bound,mean_f,predicted_mean_f,ok\n";
  try {
    ExactChain chain(g, p, cfg.m);
    double inv = 1.0 / std::abs(wilson_lambda(n));
    auto times = cfg.times.empty() ? std::vector<double>{0.1 * inv, 0.5 * inv, inv} : cfg.times;
    bool all_ok = true;
    for (const auto& c : chebyshev_lower_check(chain, p, times)) {
      csv << fmt(c.time) << "," << fmt(c.tv) << "," << fmt(c.bound) << "," << fmt(c.mean_f) << ","
          << fmt(c.predicted_mean_f) << "," << (c.ok ? 1 : 0) << "\n";
      all_ok &= c.ok;
    }
    out.json["chebyshev_ok"] = all_ok;
  } catch (const StateSpaceTooLarge& e) {
    out.json["chebyshev_ok"] = nullptr;
    out.json["note"] = e.what();
  }
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_bounds(const ExperimentConfig& cfg) {
  auto g = cfg.make_graph();
  auto p = cfg.param();
  auto r = bound_report(g, p, cfg.m, cfg.eps, cfg.graph == "line", cfg.c_eps, cfg.scale());
  ExperimentOutput out;
  out.json = header(cfg);
  auto item = [](double v, const char* what) { return json{{"value", v}, {"meaning", what}}; };
  out.json["a"] = r.a;
  out.json["b"] = r.b;
  out.json["pstar"] = item(r.pstar, "uniform lower bound on the near-even split mass");
  out.json["K"] = item(r.K, "8 a / pstar^2, round count scale for the first depinking");
  out.json["c_s"] = item(r.c_s, "ink decay rate per round, 1 / (4 K log(12 a / pstar^2))");
  out.json["loss_c"] = item(r.loss_c, "red loss per round in the modified process, pstar^2 / (4a)");
  out.json["depink_moment_bound"] = item(r.depink_moment_bound, "12 a / pstar^2");
  out.json["upper_coefficient_over_Cprime"] = item(r.upper_coeff, "a pstar^-2 log(12 a pstar^-2) log(a+b), times C'");
  out.json["max_meeting_time"] = item(r.max_meeting, "max expected meeting time on the halved graph");
  out.json["recommended_round_length"] = item(r.recommended_T, "2 * max meeting time");
  out.json["mixing_upper_bound_over_Cprime"] =
      item(r.upper_bound_over_cprime, "coefficient * log((n+m)/eps) * max meeting time, times C'");
  if (cfg.graph == "line") {
    out.json["line_lower_bound"] = item(r.lower_bound, "(n^3/pi^2)(log n - log(1 + n/m + 1/s) - c_eps)");
    out.json["line_lower_bound_vacuous"] = r.lower_bound_vacuous;
  }
  std::ostringstream csv;
  csv << "name,value\n";
  csv << "pstar," << fmt(r.pstar) << "\nK," << fmt(r.K) << "\nc_s," << fmt(r.c_s) << "\nloss_c," << fmt(r.loss_c)
      << "\ndepink_moment_bound," << fmt(r.depink_moment_bound) << "\nupper_coefficient_over_Cprime,"
      << fmt(r.upper_coeff) << "\nmax_meeting_time," << fmt(r.max_meeting) << "\nrecommended_round_length,"
      << fmt(r.recommended_T) << "\nmixing_upper_bound_over_Cprime," << fmt(r.upper_bound_over_cprime) << "\n";
  if (cfg.graph == "line") csv << "line_lower_bound," << fmt(r.lower_bound) << "\n";
  out.csv = csv.str();
  return out;
}

std::string list_text(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

ExperimentOutput run_replay(const ExperimentConfig& cfg) {
  auto r = replay_walkthrough();
  std::ostringstream csv;
  csv << "update,time,edge,black,red,pink,white,red_labels,white_labels,marked\n";
  for (const auto& s : r.steps) {
    csv << s.update << "," << fmt(s.time) << "," << (s.update ? std::to_string(s.edge.v) + "-" + std::to_string(s.edge.w) : "")
        << "," << list_text(s.black) << "," << list_text(s.red) << "," << list_text(s.pink) << "," << list_text(s.white)
        << "," << list_text(s.red_labels) << "," << list_text(s.white_labels) << "," << s.marked << "\n";
  }
  ExperimentOutput out;
  out.json = header(cfg);
  out.json["blacks_unchanged_on_first_update"] = r.blacks_unchanged_first;
  out.json["one_labelled_white_moved_on_first_update"] = r.one_labelled_white_moved_first;
  out.json["marked_ends_on_vertex_2"] = r.marked_ends_on_2;
  out.json["pair_pinkened_onto_2_and_3"] = r.pair_pinkened_on_2_and_3;
  out.json["ok"] = r.ok();
  out.csv = csv.str();
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  const std::string& c = cfg.command;
  if (c == "simulate") return run_simulate(cfg, threads);
  if (c == "mabb") return run_mabb(cfg);
  if (c == "cham") return run_cham(cfg, threads);
  if (c == "meet") return run_meet(cfg, threads);
  if (c == "mix-exact") return run_mix_exact(cfg);
  if (c == "mix-mc") return run_mix_mc(cfg, threads);
  if (c == "lower-bound") return run_lower_bound(cfg);
  if (c == "bounds") return run_bounds(cfg);
  if (c == "replay-appendix-c") return run_replay(cfg);
  throw InvalidArgument("unknown command '" + c + "'");
}

}  // namespace bbsp::tools
