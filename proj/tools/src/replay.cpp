#include <algorithm>

#include "bbsp/bbsp.hpp"
#include "bbsp_tools/experiments.hpp"

namespace bbsp::tools {

namespace {

// Edge index of {v, v+1} on the line.
std::size_t line_edge(const WeightedGraph& g, Vertex v) {
  for (std::size_t i = 0; i < g.edges().size(); ++i)
    if (g.edges()[i].v == v && g.edges()[i].w == v + 1) return i;
  throw InvalidArgument("edge not found");
}

ReplayStep snapshot(int update, double t, const Edge& e, const ChameleonState& st, Vertex marked) {
  ReplayStep s;
  s.update = update;
  s.time = t;
  s.edge = e;
  s.black = st.black;
  s.red = st.red;
  s.pink = st.pink;
  for (Vertex v = 1; v <= st.n(); ++v) s.white.push_back(st.white(v));
  s.red_labels.assign(st.red_label.begin(), st.red_label.begin() + st.num_labels);
  s.white_labels.assign(st.white_label.begin(), st.white_label.begin() + st.num_labels);
  s.marked = marked;
  return s;
}

struct Candidate {
  ChameleonState cham;
  MarkedState marked;
};

// Deterministic search over stream values for the first event that produces
// the wanted outcome. Both processes see the same event, as they would when
// driven by one stream.
template <class Want>
Candidate search(const WeightedGraph& g, const SplitKernel& k, const Candidate& from, std::size_t edge, double time,
                 std::uint64_t salt, Want want) {
  for (std::uint64_t i = 0; i < 1'000'000; ++i) {
    Event ev;
    ev.index = salt;
    ev.time = time;
    ev.edge = edge;
    ev.ub = bits_to_unit(derive_key({salt, i, 1}));
    ev.uc_bits = derive_key({salt, i, 2});
    Candidate c = from;
    chameleon_step(g, k, c.cham, ev, ChameleonMode::Standard);
    mabb_apply(g, k, c.marked, ev);
    check_invariants(c.cham);
    if (c.cham.black != c.marked.nonmarked) throw InvariantViolation("chameleon blacks left the marked process");
    if (want(c)) return c;
  }
  throw InvariantViolation("no stream value realizes the walkthrough update");
}

}  // namespace

ReplayResult replay_walkthrough() {
  const auto g = make_line(7);
  const SplitParam p(1, 1);
  const Occupancy xi{0, 1, 0, 1, 0, 0, 0};
  const Vertex x = 3;
  SplitKernel k(p, total(xi) + 1);

  Candidate c0{init_chameleon(p, xi, x), MarkedState{xi, x}};
  check_invariants(c0.cham);
  ReplayResult r;
  r.steps.push_back(snapshot(0, 0.0, Edge{}, c0.cham, x));

  const std::size_t e12 = line_edge(g, 1), e23 = line_edge(g, 2);
  auto white_vertex = [](const Candidate& c) { return c.cham.white_label[0]; };

  Candidate c1 = search(g, k, c0, e12, 1.0, 1, [&](const Candidate& c) {
    return c.cham.black == c0.cham.black && white_vertex(c) != white_vertex(c0);
  });
  r.blacks_unchanged_first = c1.cham.black == c0.cham.black;
  r.one_labelled_white_moved_first = c1.cham.num_labels >= 1 && white_vertex(c1) != white_vertex(c0);
  r.steps.push_back(snapshot(1, 1.0, g.edges()[e12], c1.cham, c1.marked.marked));

  Candidate c2 = search(g, k, c1, e23, 2.0, 2, [&](const Candidate& c) {
    return c.marked.marked == 2 && c.cham.pink[1] == 1 && c.cham.pink[2] == 1;
  });
  r.marked_ends_on_2 = c2.marked.marked == 2;
  r.pair_pinkened_on_2_and_3 = c2.cham.pink[1] == 1 && c2.cham.pink[2] == 1 && c2.cham.total_pink == 2;
  r.steps.push_back(snapshot(2, 2.0, g.edges()[e23], c2.cham, c2.marked.marked));
  return r;
}

}  // namespace bbsp::tools
