#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mttspo/interval.hpp"
#include "mttspo/tour_search.hpp"
#include "mttspo/window_graph.hpp"

namespace mttspo {

/// Raised when an analysis is asked for more targets than it supports.
class CapabilityLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kAnalysisTargetCap = 10;

/// Window-node sequence of a full tour, depot first and last.
using WindowSequence = std::vector<int>;

struct TargetUsability {
  int target = 0;
  IntervalSet usable;  // maximal usable intervals
  double window_total = 0.0;
  double fraction = 0.0;
};

struct UsableReport {
  std::vector<TargetUsability> targets;
  double min_fraction = 1.0;
  long sequences = 0;
  long return_rejections = 0;  // sequences dropped only because no return edge exists
};

namespace detail {

inline void checkCap(const Scene& scene, int cap) {
  if (scene.instance.targetCount() > cap) {
    throw CapabilityLimit("usable-interval analysis supports at most " + std::to_string(cap) +
                          " targets, instance has " +
                          std::to_string(scene.instance.targetCount()));
  }
}

/// Visits every feasible window-node sequence. Partial sequences are
/// extended by earliest interception; a branch is cut when the arrival is
/// already past the time-window-graph label or fails the lookahead test.
inline void forEachFeasibleSequence(const Scene& scene, const TimeWindowGraph& gtw,
                                    const Deadline& deadline,
                                    const std::function<void(const WindowSequence&)>& visit) {
  const int n = scene.instance.targetCount();
  std::vector<char> visited(n + 1, 0);
  WindowSequence seq{0};
  std::function<void(Point, double, int)> extend = [&](Point p, double T, int depth) {
    deadline.check();
    const int last = seq.back();
    if (depth == n) {
      if (n > 0 && !gtw.label(last, 0)) return;
      if (planToWindow(scene, p, T, scene.nodes[0]).feasible()) {
        seq.push_back(0);
        visit(seq);
        seq.pop_back();
      }
      return;
    }
    for (const WindowEdge& e : gtw.out[last]) {
      const WindowNode& s = scene.nodes[e.to];
      if (s.isDepot() || visited[s.target] || T > e.lfdt + kTimeSlack) continue;
      const PlanResult r = planToWindow(scene, p, T, s);
      if (!r.feasible()) continue;
      visited[s.target] = 1;
      if (depth + 1 == n || lookahead(s.id, visited, r.arrival, gtw)) {
        seq.push_back(s.id);
        extend(r.trajectory.endPoint(), r.arrival, depth + 1);
        seq.pop_back();
      }
      visited[s.target] = 0;
    }
  };
  extend(scene.instance.depot, 0.0, 0);
}

}  // namespace detail

/// All window-node sequences that admit a full tour, each written as
/// (depot, s1, ..., sN, depot).
inline std::vector<WindowSequence> enumerateFeasibleSequences(const Scene& scene,
                                                              const TimeWindowGraph& gtw,
                                                              int cap = kAnalysisTargetCap,
                                                              const Deadline& deadline = {}) {
  detail::checkCap(scene, cap);
  std::vector<WindowSequence> out;
  detail::forEachFeasibleSequence(scene, gtw, deadline,
                                  [&](const WindowSequence& s) { out.push_back(s); });
  return out;
}

/// Latest interception times along a sequence, memoised by suffix since the
/// latest time at position i depends only on s^i..s^N.
class LatestTimes {
 public:
  explicit LatestTimes(const Scene& scene) : scene_(&scene) {}

  /// Latest time target seq[i] can be met so that seq[i+1..] are still met
  /// in order. `seq` excludes the depots.
  std::optional<double> at(const std::vector<int>& seq, std::size_t i) {
    const std::vector<int> suffix(seq.begin() + static_cast<long>(i), seq.end());
    if (auto it = memo_.find(suffix); it != memo_.end()) return it->second;
    const WindowNode& s = scene_->nodes[seq[i]];
    std::optional<double> result;
    if (i + 1 == seq.size()) {
      result = s.tf;
    } else if (auto next = at(seq, i + 1)) {
      const WindowNode& v = scene_->nodes[seq[i + 1]];
      result = latestDeparture(*scene_, s, v.at(*next), *next);
    }
    memo_.emplace(suffix, result);
    return result;
  }

 private:
  const Scene* scene_;
  std::map<std::vector<int>, std::optional<double>> memo_;
};

/// [earliest, latest] interception time of each target along a feasible
/// sequence (depots included or not). Earliest times chain interceptions
/// forward from the depot at t = 0; latest times chain latest departures
/// backward from the last window's end. The last window must also admit the
/// return to the depot.
inline std::vector<Interval> sequenceUsableIntervals(const Scene& scene, const WindowSequence& seq,
                                                     LatestTimes* latest = nullptr) {
  std::vector<int> inner;
  for (int id : seq) {
    if (id != 0) inner.push_back(id);
  }
  std::vector<Interval> out(inner.size());
  Point p = scene.instance.depot;
  double T = 0.0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const PlanResult r = planToWindow(scene, p, T, scene.nodes[inner[i]]);
    if (!r.feasible()) throw AnalysisError("sequence is infeasible at position " + std::to_string(i + 1));
    out[i].lo = r.arrival;
    p = r.trajectory.endPoint();
    T = r.arrival;
  }
  if (!planToWindow(scene, p, T, scene.nodes[0]).feasible()) {
    throw AnalysisError("sequence cannot return to the depot");
  }
  if (inner.empty()) return out;
  if (!lfdt(scene, scene.nodes[inner.back()], scene.nodes[0])) {
    throw AnalysisError("last window has no return edge to the depot");
  }
  LatestTimes local(scene);
  LatestTimes& lt = latest ? *latest : local;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const auto hi = lt.at(inner, i);
    if (!hi) throw AnalysisError("no latest time at position " + std::to_string(i + 1));
    out[i].hi = *hi;
  }
  return out;
}

/// Maximal usable intervals and usable fractions over all feasible
/// sequences. Throws AnalysisError if the instance is infeasible.
inline UsableReport usableFraction(const Scene& scene, const TimeWindowGraph& gtw,
                                   int cap = kAnalysisTargetCap, const Deadline& deadline = {}) {
  detail::checkCap(scene, cap);
  const Instance& inst = scene.instance;
  UsableReport report;
  report.targets.resize(inst.targetCount());
  for (int i = 0; i < inst.targetCount(); ++i) {
    report.targets[i].target = i + 1;
    for (const TargetWindow& w : inst.targets[i].windows) report.targets[i].window_total += w.length();
  }
  LatestTimes latest(scene);
  detail::forEachFeasibleSequence(scene, gtw, deadline, [&](const WindowSequence& seq) {
    std::vector<Interval> ivs;
    try {
      ivs = sequenceUsableIntervals(scene, seq, &latest);
    } catch (const AnalysisError&) {
      ++report.return_rejections;
      return;
    }
    ++report.sequences;
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const int target = scene.nodes[seq[k + 1]].target;
      report.targets[target - 1].usable.add(ivs[k]);
    }
  });
  if (report.sequences == 0) throw AnalysisError("instance is infeasible; usable fraction undefined");
  for (TargetUsability& t : report.targets) {
    t.fraction = std::clamp(t.usable.totalLength() / t.window_total, 0.0, 1.0);
    report.min_fraction = std::min(report.min_fraction, t.fraction);
  }
  return report;
}

inline void writeUsableIntervalsCsv(const UsableReport& report, std::ostream& os) {
  os << "target,interval_lo,interval_hi\n";
  for (const TargetUsability& t : report.targets) {
    for (const Interval& iv : t.usable) os << t.target << ',' << iv.lo << ',' << iv.hi << '\n';
  }
}

inline void writeUsableFractionsCsv(const UsableReport& report, std::ostream& os) {
  os << "target,fraction\n";
  for (const TargetUsability& t : report.targets) os << t.target << ',' << t.fraction << '\n';
}

inline void writeMinFractionCsv(const UsableReport& report, std::ostream& os) {
  os << "min_fraction\n" << report.min_fraction << '\n';
}

}  // namespace mttspo
