// Sampled-points baseline: discretize each target's windows into timed
// points, decide which ordered pairs of points the agent can connect, and
// search for a depot-anchored sequence that visits one point per target.
// The point count per target grows until a sequence exists.

#ifndef MTTSPO_BASELINE_HPP
#define MTTSPO_BASELINE_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "mttspo/scene.hpp"

namespace mttspo {

class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplePoint {
  int target = 0;
  int window_index = 0;
  double t = 0.0;
  Point p;
};

/// n points per target at uniform offsets k*L/(n-1) along the concatenation
/// of its windows (total length L); n = 1 gives the first window's start.
/// An offset that lands on a seam between two windows maps to the earlier
/// window's end. A point that coincides in space and time with one of an
/// earlier target is shifted by 1e-9 s within its window.
inline std::vector<SamplePoint> samplePoints(const Instance& inst, int n_per_target) {
  if (n_per_target < 1) throw std::invalid_argument("need at least one point per target");
  std::vector<SamplePoint> out;
  for (const Target& target : inst.targets) {
    const double total = target.totalWindowLength();
    const std::size_t first = out.size();
    for (int k = 0; k < n_per_target; ++k) {
      const double offset = n_per_target == 1 ? 0.0 : total * k / (n_per_target - 1);
      double before = 0.0;
      std::size_t j = 0;
      while (j + 1 < target.windows.size() && offset > before + target.windows[j].length()) {
        before += target.windows[j].length();
        ++j;
      }
      const TargetWindow& w = target.windows[j];
      const double t = std::min(w.tf, w.t0 + (offset - before));
      SamplePoint sp{target.id, static_cast<int>(j), t, w.at(t)};
      for (std::size_t i = 0; i < first; ++i) {
        if (out[i].t == sp.t && out[i].p == sp.p) {
          sp.t = sp.t + 1e-9 <= w.tf ? sp.t + 1e-9 : sp.t - 1e-9;
          sp.p = w.at(sp.t);
          break;
        }
      }
      out.push_back(sp);
    }
  }
  return out;
}

/// Which transfers are possible: depot -> point, point -> point (different
/// targets, forward in time), and point -> depot (no deadline).
struct TransferTable {
  std::vector<SamplePoint> points;
  std::vector<char> from_depot;
  std::vector<char> to_depot;
  std::vector<boost::dynamic_bitset<>> arcs;  // arcs[i][j]: i -> j feasible
  std::vector<AttachedPoint> attached;

  bool feasible(int i, int j) const { return arcs[i][j]; }
};

/// Feasibility of each transfer: shortest path length / v_max must not
/// exceed the time between the two points. Pairs whose straight-line
/// distance already exceeds the available time skip the path query.
inline TransferTable pairwiseTransfers(const std::vector<SamplePoint>& points,
                                       const Instance& inst, const PathOracle& paths,
                                       const Deadline& deadline = {}) {
  TransferTable table;
  table.points = points;
  const int n = static_cast<int>(points.size());
  const double v = inst.v_max;
  table.attached.reserve(n);
  for (const SamplePoint& sp : points) table.attached.push_back(paths.attach(sp.p));
  const AttachedPoint depot = paths.attach(inst.depot);
  const std::vector<double> from_depot = paths.distancesFrom(depot);
  table.from_depot.assign(n, 0);
  table.to_depot.assign(n, 0);
  table.arcs.assign(n, boost::dynamic_bitset<>(n));
  for (int i = 0; i < n; ++i) {
    deadline.check();
    const AttachedPoint& a = table.attached[i];
    const double d0 = paths.distance(depot, from_depot, a);
    table.from_depot[i] = d0 / v <= points[i].t;
    table.to_depot[i] = d0 < kInf;
    const std::vector<double> from_a = paths.distancesFrom(a);
    for (int j = 0; j < n; ++j) {
      if (points[i].target == points[j].target) continue;
      const double dt = points[j].t - points[i].t;
      if (dt < 0.0) continue;
      if (distance(points[i].p, points[j].p) > v * dt) continue;
      if (paths.distance(a, from_a, table.attached[j]) / v <= dt) table.arcs[i].set(j);
    }
  }
  return table;
}

/// Depot-anchored point sequence visiting one point of every target, or
/// nothing. Dynamic program over time-ordered points: reach[j] holds the
/// visited-target sets of feasible chains ending at j. Among complete chains
/// the one finishing earliest at the depot is returned; ties and
/// predecessors resolve to the earliest point in time order.
inline std::optional<std::vector<int>> solveGtspFeasibility(const TransferTable& table,
                                                            int clusters,
                                                            const PathOracle& paths,
                                                            const Instance& inst,
                                                            int cluster_cap = 12,
                                                            const Deadline& deadline = {}) {
  if (clusters > cluster_cap || clusters > 20) {
    throw CapabilityError("baseline supports at most " + std::to_string(cluster_cap) +
                          " targets, got " + std::to_string(clusters));
  }
  const int n = static_cast<int>(table.points.size());
  if (clusters == 0) return std::vector<int>{};
  const std::size_t masks = std::size_t{1} << clusters;
  const std::size_t full = masks - 1;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return table.points[a].t < table.points[b].t; });
  std::vector<boost::dynamic_bitset<>> without(clusters, boost::dynamic_bitset<>(masks));
  for (int c = 0; c < clusters; ++c) {
    for (std::size_t m = 0; m < masks; ++m) {
      if (!(m >> c & 1)) without[c].set(m);
    }
  }
  auto cluster = [&](int i) { return table.points[i].target - 1; };
  std::vector<boost::dynamic_bitset<>> reach(n, boost::dynamic_bitset<>(masks));
  for (int jj = 0; jj < n; ++jj) {
    deadline.check();
    const int j = order[jj];
    const int cj = cluster(j);
    if (table.from_depot[j]) reach[j].set(std::size_t{1} << cj);
    for (int ii = 0; ii < jj; ++ii) {
      const int i = order[ii];
      if (!table.feasible(i, j) || reach[i].none()) continue;
      reach[j] |= (reach[i] & without[cj]) << (std::size_t{1} << cj);
    }
  }

  int best = -1;
  double best_finish = kInf;
  const AttachedPoint depot = paths.attach(inst.depot);
  for (int jj = 0; jj < n; ++jj) {
    const int j = order[jj];
    if (!reach[j].test(full) || !table.to_depot[j]) continue;
    const double finish =
        table.points[j].t + paths.distance(table.attached[j], depot) / inst.v_max;
    if (finish < best_finish) {
      best_finish = finish;
      best = j;
    }
  }
  if (best < 0) return std::nullopt;

  std::vector<int> seq{best};
  std::size_t mask = full;
  std::vector<int> rank(n);
  for (int k = 0; k < n; ++k) rank[order[k]] = k;
  while (true) {
    const int j = seq.back();
    const std::size_t rest = mask & ~(std::size_t{1} << cluster(j));
    if (rest == 0) break;
    int pred = -1;
    for (int ii = 0; ii < rank[j]; ++ii) {
      const int i = order[ii];
      if (table.feasible(i, j) && reach[i].test(rest)) {
        pred = i;
        break;
      }
    }
    if (pred < 0) throw std::logic_error("baseline backtrack failed");
    seq.push_back(pred);
    mask = rest;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

/// Full-speed moves along shortest paths, waiting at each sample point until
/// its time, then back to the depot.
inline Solution assembleBaselineSolution(const TransferTable& table, const std::vector<int>& seq,
                                         const PathOracle& paths, const Instance& inst) {
  Solution sol;
  Trajectory& traj = sol.trajectory;
  traj.push(0.0, inst.depot);
  AttachedPoint here = paths.attach(inst.depot);
  double t = 0.0;
  auto travel = [&](const AttachedPoint& to, std::optional<double> until) {
    const std::vector<Point> path = paths.path(here, to);
    if (path.empty()) throw std::logic_error("baseline transfer has no path");
    for (std::size_t k = 1; k < path.size(); ++k) {
      t += distance(path[k - 1], path[k]) / inst.v_max;
      if (until) t = std::min(t, *until);
      traj.push(t, path[k]);
    }
    if (until) {
      t = *until;
      traj.push(t, to.p);
    }
    here = to;
  };
  for (int i : seq) {
    const SamplePoint& sp = table.points[i];
    travel(table.attached[i], sp.t);
    sol.interceptions.push_back({sp.target, sp.window_index, sp.t});
  }
  travel(paths.attach(inst.depot), std::nullopt);
  sol.final_time = traj.endTime();
  return sol;
}

struct BaselineOptions {
  int start_n = 10;
  int step = 10;
  std::optional<double> budget_s = 300.0;
  std::optional<int> max_n;  // stop (INFEASIBLE) after this many points per target
  int cluster_cap = 12;
};

struct BaselineAttempt {
  int n_per_target = 0;
  double wall_s = 0.0;
  std::string status;
};

enum class BaselineStatus { Feasible, Infeasible, Timeout };

inline const char* toString(BaselineStatus s) {
  switch (s) {
    case BaselineStatus::Feasible:
      return "FEASIBLE";
    case BaselineStatus::Infeasible:
      return "INFEASIBLE";
    case BaselineStatus::Timeout:
      return "TIMEOUT";
  }
  return "?";
}

struct BaselineResult {
  BaselineStatus status = BaselineStatus::Timeout;
  Solution solution;
  std::vector<BaselineAttempt> attempts;
  double setup_s = 0.0;  // visibility graph and shortest paths

  double wallSeconds() const {
    double total = setup_s;
    for (const BaselineAttempt& a : attempts) total += a.wall_s;
    return total;
  }
  int finalN() const { return attempts.empty() ? 0 : attempts.back().n_per_target; }
};

/// Escalates the per-target point count from start_n in steps of `step`
/// until a sequence exists, the budget runs out, or max_n is passed.
inline BaselineResult baselineSolve(const Instance& inst, const BaselineOptions& opts = {}) {
  validateInstance(inst);
  const Deadline deadline = opts.budget_s ? Deadline(*opts.budget_s) : Deadline();
  BaselineResult result;
  if (inst.targetCount() > opts.cluster_cap) {
    throw CapabilityError("baseline supports at most " + std::to_string(opts.cluster_cap) +
                          " targets");
  }
  Stopwatch setup;
  const VisibilityGraph g = buildVisibilityGraph(inst);
  const PathOracle paths(g, inst.obstacles);
  result.setup_s = setup.seconds();
  if (inst.targetCount() == 0) {
    result.status = BaselineStatus::Feasible;
    result.solution.trajectory.push(0.0, inst.depot);
    return result;
  }
  for (int n = opts.start_n;; n += opts.step) {
    if (opts.max_n && n > *opts.max_n) {
      result.status = BaselineStatus::Infeasible;
      return result;
    }
    if (deadline.expired()) {
      result.status = BaselineStatus::Timeout;
      return result;
    }
    Stopwatch clock;
    BaselineAttempt attempt{n, 0.0, "INFEASIBLE"};
    try {
      const TransferTable table = pairwiseTransfers(samplePoints(inst, n), inst, paths, deadline);
      const auto seq =
          solveGtspFeasibility(table, inst.targetCount(), paths, inst, opts.cluster_cap, deadline);
      if (seq) {
        result.solution = assembleBaselineSolution(table, *seq, paths, inst);
        attempt.status = "FEASIBLE";
      }
    } catch (const TimeoutError&) {
      attempt.status = "TIMEOUT";
    }
    attempt.wall_s = clock.seconds();
    result.attempts.push_back(attempt);
    if (attempt.status == "FEASIBLE") {
      result.status = BaselineStatus::Feasible;
      return result;
    }
    if (attempt.status == "TIMEOUT") {
      result.status = BaselineStatus::Timeout;
      return result;
    }
  }
}

/// `n_per_target,wall_s,status` rows; wall times only when requested.
inline void writeAttemptsCsv(const std::vector<BaselineAttempt>& attempts, std::ostream& os,
                             bool timings = true) {
  os << "n_per_target,wall_s,status\n";
  for (const BaselineAttempt& a : attempts) {
    os << a.n_per_target << ",";
    if (timings) os << a.wall_s;
    os << "," << a.status << "\n";
  }
}

}  // namespace mttspo

#endif  // MTTSPO_BASELINE_HPP
