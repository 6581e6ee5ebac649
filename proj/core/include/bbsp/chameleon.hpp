#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/split_kernel.hpp"
#include "bbsp/state_space.hpp"

namespace bbsp {

enum class ChameleonMode { Standard, Modified };

// Black / red / pink / white particles. Every vertex holds chi(black) non-black
// slots; whites are whatever is left after reds and pinks.
struct ChameleonState {
  SplitParam param{1, 1};
  Occupancy black;
  std::vector<int> red, pink;  // per vertex, index v-1
  // Label j in [0, num_labels): vertex of the j-th labelled red / white, 0 = none.
  std::vector<Vertex> red_label, white_label;
  int num_labels = 0;
  long long total_red = 0, total_pink = 0;
  long long slots = 0;  // a(m-1) + b n

  int n() const { return static_cast<int>(black.size()); }
  int white(Vertex v) const;
  long long total_white() const { return slots - total_red - total_pink; }
  double ink(Vertex v) const { return red[v - 1] + 0.5 * pink[v - 1]; }
  // 2 * total ink, an exact integer
  long long ink2() const { return 2 * total_red + total_pink; }
  double total_ink() const { return 0.5 * static_cast<double>(ink2()); }
  bool absorbed() const { return ink2() == 0 || ink2() == 2 * slots; }
};

// All chi(x_x) non-black particles at x red, everything else white, labels
// assigned in vertex order.
ChameleonState init_chameleon(const SplitParam& p, const Occupancy& black, Vertex x);

// Labels min(#red, #white) reds and whites, each in vertex order.
void assign_labels(ChameleonState& st);

// Throws InvariantViolation unless counts, totals and labels are consistent.
void check_invariants(const ChameleonState& st);

// Placement bounds on one edge for a given black split.
struct PlacementBounds {
  long long l_v = 0, u_v = 0, l_w = 0, u_w = 0;
  long long lp_v = 0, up_v = 0, lp_w = 0, up_w = 0;
  long long cap_v = 0, cap_w = 0;  // chi(B'(v)), chi(B'(w))
  long long reds = 0, pinks = 0;
  double stay_v = 0.0;  // P(v,v)
  double m_star_v = 0.0;
  double theta_v = 0.5;
};

// reds/pinks are the totals on the edge; bv, bw the black counts before the
// split, bv_new the count on v after it.
PlacementBounds placement_bounds(const SplitParam& p, int bv, int bw, int bv_new, long long reds, long long pinks);

// Solves the theta equation; 1/2 when the denominator vanishes.
double solve_theta(const PlacementBounds& b, double m_star);

// What happened on one event, for diagnostics and tests.
struct StepTrace {
  PlacementBounds bounds;
  bool had_reds = false;
  bool branch_a = false;       // fair coin placement of the pile
  int paired_before = 0;       // paired reds on the edge before Step 1
  int paired_in_pile = 0;      // paired reds still in the pile after Step 1
  int pinkened = 0;            // new pink pairs
  int old_pinks_on_v = 0;
  int reds_to_v = 0;
};

// Applies one event (blacks move as in the plain process).
void chameleon_step(const WeightedGraph& g, const SplitKernel& kernel, ChameleonState& st, const Event& ev,
                    ChameleonMode mode, StepTrace* trace = nullptr);

// Step size of the depinking ink walk: ceil(min(r, L - r) / 3).
long long depink_delta(long long ink, long long slots);

struct DepinkRecord {
  double time = 0.0;
  std::uint64_t round = 0;
  double ink_before = 0.0, ink_after = 0.0;
  bool up = false;
};

struct RoundRecord {
  std::uint64_t round = 0;  // rounds are numbered from 1
  long long red_start = 0, white_start = 0, pink_start = 0;
  long long red_end = 0, white_end = 0, pink_end = 0;  // just before the round end
  bool depinked = false;
};

struct ChameleonConfig {
  double round_length = 1.0;
  ChameleonMode mode = ChameleonMode::Standard;
  double t_end = 1e300;
  bool stop_on_absorption = true;
  bool record_rounds = false;
  std::vector<double> sample_times;  // sorted; state recorded at each
};

enum class ChameleonPoint { Event, RoundEnd };
using ChameleonObserver = std::function<void(double, const ChameleonState&, ChameleonPoint, const StepTrace*)>;

struct ChameleonRun {
  ChameleonState final_state;
  double final_time = 0.0;
  bool absorbed = false;
  bool fill = false;
  double absorption_time = 0.0;
  std::uint64_t events = 0;
  std::vector<DepinkRecord> depinks;
  std::vector<RoundRecord> rounds;
  std::vector<ChameleonState> samples;
};

ChameleonRun run_chameleon(const WeightedGraph& g, const SplitKernel& kernel, const ChameleonState& init,
                           EventStream& stream, const ChameleonConfig& cfg, const ChameleonObserver& observer = {});

}  // namespace bbsp
