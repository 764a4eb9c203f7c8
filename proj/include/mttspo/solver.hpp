// End-to-end solve: visibility products, time window graph, tree search,
// with a shared wall-clock budget and per-phase timings.

#ifndef MTTSPO_SOLVER_HPP
#define MTTSPO_SOLVER_HPP

#include <optional>

#include "mttspo/tour_search.hpp"

namespace mttspo {

struct SolveOptions {
  std::optional<double> budget_s;
  SearchOptions search;
};

struct PhaseTimes {
  double visibility_s = 0.0;
  double twg_s = 0.0;
  double tree_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Solution solution;
  SearchStats stats;
  PhaseTimes times;
  int window_nodes = 0;
  std::size_t twg_edges = 0;

  double wallSeconds() const { return times.visibility_s + times.twg_s + times.tree_s; }
};

/// Throws InputError on an invalid instance.
inline SolveResult solve(const Instance& inst, const SolveOptions& opts = {}) {
  const Deadline deadline = opts.budget_s ? Deadline(*opts.budget_s) : Deadline();
  SolveResult out;
  Stopwatch vis_clock;
  const Scene scene = buildScene(inst);
  out.times.visibility_s = vis_clock.seconds();
  if (deadline.expired()) {
    out.status = SolveStatus::Timeout;
    return out;
  }

  Stopwatch twg_clock;
  TimeWindowGraph gtw;
  try {
    gtw = buildTimeWindowGraph(scene, deadline);
  } catch (const TimeoutError&) {
    out.times.twg_s = twg_clock.seconds();
    out.status = SolveStatus::Timeout;
    return out;
  }
  out.times.twg_s = twg_clock.seconds();
  out.window_nodes = gtw.nodeCount();
  out.twg_edges = gtw.edgeCount();

  Stopwatch tree_clock;
  SearchResult search = dfsSolve(scene, gtw, deadline, opts.search);
  out.times.tree_s = tree_clock.seconds();
  out.status = search.status;
  out.solution = std::move(search.solution);
  out.stats = search.stats;
  return out;
}

}  // namespace mttspo

#endif  // MTTSPO_SOLVER_HPP
