// Problem instances, window-nodes, agent trajectories, and the feasibility
// validator for candidate tours.

#ifndef MTTSPO_MODEL_HPP
#define MTTSPO_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mttspo/geometry.hpp"

namespace mttspo {

/// Constant-velocity motion of one target during one of its windows.
struct TargetWindow {
  double t0 = 0.0;
  double tf = 0.0;
  Point p0;  // position at t0
  Vec2 vel;

  Point at(double t) const { return LinearMotion{p0, vel, t0, tf}.at(t); }
  Point endPosition() const { return at(tf); }
  double length() const { return tf - t0; }
};

struct Target {
  int id = 0;  // 1-based
  std::vector<TargetWindow> windows;

  double totalWindowLength() const {
    double total = 0.0;
    for (const TargetWindow& w : windows) total += w.length();
    return total;
  }
};

struct Instance {
  GridSpec grid;
  ObstacleSet obstacles;
  Point depot;
  double v_max = 1.0;
  std::vector<Target> targets;  // targets[i].id == i + 1

  int targetCount() const { return static_cast<int>(targets.size()); }

  /// Length of the bounding-box diagonal of everything in the instance.
  double scale() const {
    Point lo = depot, hi = depot;
    auto grow = [&](Point p) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    };
    grow({0.0, 0.0});
    grow({grid.width(), grid.height()});
    for (const Target& target : targets) {
      for (const TargetWindow& w : target.windows) {
        grow(w.p0);
        grow(w.endPosition());
      }
    }
    return std::max(1.0, distance(lo, hi));
  }
};

/// A (target, window) pairing, or the depot node (target 0, window [0, inf)).
/// Also carries the window's motion so positions can be evaluated directly.
struct WindowNode {
  int id = 0;             // index into windowNodes(); 0 is the depot
  int target = 0;         // 0 for the depot; negative for time-reversed nodes
  int window_index = -1;  // -1 for the depot
  double t0 = 0.0;
  double tf = kInf;
  Point p0;  // position at t0 (or the fixed position when vel == 0)
  Vec2 vel;

  bool isDepot() const { return target == 0; }
  LinearMotion motion() const { return {p0, vel, t0, tf}; }
  Point at(double t) const { return motion().at(t); }
  Point startPosition() const { return p0; }
  Point endPosition() const { return at(tf); }
};

/// The node seen when running time backwards: window [-tf, -t0], traversing
/// the same path in the opposite direction.
inline WindowNode reversed(const WindowNode& s) {
  WindowNode r = s;
  r.target = -s.target;
  r.t0 = -s.tf;
  r.tf = -s.t0;
  r.p0 = s.endPosition();
  r.vel = {-s.vel.x, -s.vel.y};
  return r;
}

inline WindowNode depotNode(Point depot) {
  WindowNode s;
  s.id = 0;
  s.target = 0;
  s.window_index = -1;
  s.t0 = 0.0;
  s.tf = kInf;
  s.p0 = depot;
  s.vel = {0.0, 0.0};
  return s;
}

/// Depot node first, then one node per (target, window), ordered by target
/// then window start.
inline std::vector<WindowNode> windowNodes(const Instance& inst) {
  std::vector<WindowNode> nodes{depotNode(inst.depot)};
  for (const Target& target : inst.targets) {
    for (std::size_t j = 0; j < target.windows.size(); ++j) {
      const TargetWindow& w = target.windows[j];
      WindowNode s;
      s.id = static_cast<int>(nodes.size());
      s.target = target.id;
      s.window_index = static_cast<int>(j);
      s.t0 = w.t0;
      s.tf = w.tf;
      s.p0 = w.p0;
      s.vel = w.vel;
      nodes.push_back(s);
    }
  }
  return nodes;
}

/// Position of targ(s) at time t; t must lie in s's window.
inline Point targetPosition(const WindowNode& s, double t) {
  if (t < s.t0 || t > s.tf) {
    throw std::out_of_range("time outside window of node " + std::to_string(s.id));
  }
  return s.at(t);
}

// ---------------------------------------------------------------------------

struct Waypoint {
  double t = 0.0;
  Point p;
};

/// Timed polyline; motion is linear between consecutive waypoints and equal
/// consecutive positions encode waiting.
struct Trajectory {
  std::vector<Waypoint> waypoints;

  bool empty() const { return waypoints.empty(); }
  double startTime() const { return waypoints.front().t; }
  double endTime() const { return waypoints.back().t; }
  Point endPoint() const { return waypoints.back().p; }

  Point at(double t) const {
    if (t <= waypoints.front().t) return waypoints.front().p;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
      const Waypoint& a = waypoints[i];
      const Waypoint& b = waypoints[i + 1];
      if (t <= b.t) {
        if (b.t == a.t) return b.p;
        return a.p + ((t - a.t) / (b.t - a.t)) * (b.p - a.p);
      }
    }
    return waypoints.back().p;
  }

  /// Appends a waypoint, skipping exact duplicates of the last one.
  void push(double t, Point p) {
    if (!waypoints.empty() && waypoints.back().t == t && waypoints.back().p == p) {
      return;
    }
    waypoints.push_back({t, p});
  }

  double pathLength() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
      total += distance(waypoints[i].p, waypoints[i + 1].p);
    }
    return total;
  }
};

struct Interception {
  int target = 0;
  int window_index = 0;
  double time = 0.0;
};

struct Solution {
  Trajectory trajectory;
  double final_time = 0.0;
  std::vector<Interception> interceptions;  // in visiting order
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationEntry {
  std::string check;
  bool ok = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool ok() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ValidationEntry& e) { return e.ok; });
  }
  bool failed(const std::string& check) const {
    return std::any_of(entries.begin(), entries.end(), [&](const ValidationEntry& e) {
      return !e.ok && e.check == check;
    });
  }
  std::string summary() const {
    std::ostringstream os;
    for (const ValidationEntry& e : entries) {
      if (!e.ok) os << e.check << ": " << e.detail << "\n";
    }
    return os.str();
  }
};

/// Checks every instance invariant; throws InputError on the first violation.
inline void validateInstance(const Instance& inst) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(inst.v_max) || inst.v_max <= 0.0) {
    throw InputError("v_max must be positive and finite");
  }
  if (!finite(inst.depot.x) || !finite(inst.depot.y)) {
    throw InputError("depot must be finite");
  }
  if (pointInInterior(inst.depot, inst.obstacles)) {
    throw InputError("depot lies inside an obstacle");
  }
  for (std::size_t i = 0; i < inst.targets.size(); ++i) {
    const Target& target = inst.targets[i];
    const std::string who = "target " + std::to_string(target.id);
    if (target.id != static_cast<int>(i) + 1) {
      throw InputError("target ids must be 1..N in order");
    }
    if (target.windows.empty()) throw InputError(who + " has no windows");
    for (std::size_t j = 0; j < target.windows.size(); ++j) {
      const TargetWindow& w = target.windows[j];
      if (!finite(w.t0) || !finite(w.tf) || !finite(w.p0.x) || !finite(w.p0.y) ||
          !finite(w.vel.x) || !finite(w.vel.y)) {
        throw InputError(who + " has non-finite window data");
      }
      if (!(w.t0 < w.tf)) throw InputError(who + " window must satisfy t0 < tf");
      if (norm(w.vel) > inst.v_max * (1.0 + 1e-12)) {
        throw InputError(who + " moves faster than v_max");
      }
      if (j > 0 && target.windows[j - 1].tf > w.t0) {
        throw InputError(who + " windows overlap or are unsorted");
      }
      const Point a = w.p0, b = w.endPosition();
      if (pointInInterior(a, inst.obstacles) || pointInInterior(b, inst.obstacles) ||
          !segmentIsFree(a, b, inst.obstacles)) {
        throw InputError(who + " window " + std::to_string(j) +
                         " passes through an obstacle");
      }
    }
  }
}

struct ValidationOptions {
  double tol = 1e-6;
  std::optional<double> speed_limit;  // defaults to the instance's v_max
};

namespace detail {

// Minimum over t in [lo, hi] of |(a0 + da*(t-lo)) - (b0 + db*(t-lo))|.
inline double minRelativeDistance(Point a0, Vec2 da, Point b0, Vec2 db,
                                  double lo, double hi) {
  const Vec2 w = a0 - b0;
  const Vec2 dv = da - db;
  const double vv = dot(dv, dv);
  double s = 0.0;
  if (vv > 0.0) s = std::clamp(-dot(w, dv) / vv, 0.0, hi - lo);
  return norm(w + s * dv);
}

}  // namespace detail

/// Distance of closest approach between the agent and target `target`
/// during any of its windows.
inline double closestApproach(const Trajectory& traj, const Target& target) {
  double best = kInf;
  const auto& wp = traj.waypoints;
  for (const TargetWindow& w : target.windows) {
    if (wp.size() == 1) {
      if (w.t0 <= wp[0].t && wp[0].t <= w.tf) {
        best = std::min(best, distance(wp[0].p, w.at(wp[0].t)));
      }
      continue;
    }
    for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
      const double lo = std::max(wp[k].t, w.t0);
      const double hi = std::min(wp[k + 1].t, w.tf);
      if (lo > hi) continue;
      const double dt = wp[k + 1].t - wp[k].t;
      if (dt == 0.0) {
        best = std::min({best, distance(wp[k].p, w.at(lo)),
                         distance(wp[k + 1].p, w.at(lo))});
        continue;
      }
      const Vec2 agent_vel = (1.0 / dt) * (wp[k + 1].p - wp[k].p);
      const Point agent_lo = wp[k].p + (lo - wp[k].t) * agent_vel;
      best = std::min(best, detail::minRelativeDistance(agent_lo, agent_vel,
                                                        w.at(lo), w.vel, lo, hi));
    }
  }
  return best;
}

/// Checks a candidate solution: depot start/end, speed limit and obstacle
/// clearance on every leg, and interception of every target inside one of
/// its windows. Tolerances: speeds within v*(1+tol), positions within
/// tol*scale where scale is the instance diameter.
inline ValidationReport validateSolution(const Instance& inst, const Solution& sol,
                                         ValidationOptions opts = {}) {
  ValidationReport report;
  const double scale = inst.scale();
  const double pos_tol = opts.tol * scale;
  const double vlim = opts.speed_limit.value_or(inst.v_max);
  auto fail = [&](std::string check, std::string detail) {
    report.entries.push_back({std::move(check), false, std::move(detail)});
  };
  const auto& wp = sol.trajectory.waypoints;
  if (wp.empty()) {
    fail("trajectory", "empty trajectory");
    return report;
  }

  ValidationEntry depot{"depot", true, ""};
  if (std::abs(wp.front().t) > opts.tol || distance(wp.front().p, inst.depot) > pos_tol) {
    depot = {"depot", false, "trajectory does not start at the depot at t=0"};
  } else if (distance(wp.back().p, inst.depot) > pos_tol) {
    depot = {"depot", false, "trajectory does not end at the depot"};
  }
  report.entries.push_back(depot);

  ValidationEntry time{"time", true, ""};
  for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
    if (!(wp[k + 1].t >= wp[k].t)) {
      time = {"time", false, "waypoint times decrease at index " + std::to_string(k + 1)};
      break;
    }
  }
  if (std::abs(sol.final_time - wp.back().t) > opts.tol * std::max(1.0, sol.final_time)) {
    time = {"time", false, "final_time differs from last waypoint time"};
  }
  report.entries.push_back(time);

  ValidationEntry speed{"speed", true, ""};
  ValidationEntry clearance{"obstacles", true, ""};
  for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
    const double dt = wp[k + 1].t - wp[k].t;
    const double dp = distance(wp[k].p, wp[k + 1].p);
    const bool speed_ok = dt > 0.0 ? dp <= vlim * dt * (1.0 + opts.tol) + 1e-12 * scale
                                   : dp <= pos_tol;
    if (speed_ok == false && speed.ok) {
      speed = {"speed", false, "leg " + std::to_string(k) + " exceeds the speed limit"};
    }
    if (clearance.ok && !segmentIsFree(wp[k].p, wp[k + 1].p, inst.obstacles)) {
      clearance = {"obstacles", false,
                   "leg " + std::to_string(k) + " enters an obstacle interior"};
    }
  }
  report.entries.push_back(speed);
  report.entries.push_back(clearance);

  for (const Target& target : inst.targets) {
    const double d = closestApproach(sol.trajectory, target);
    if (d > pos_tol) {
      fail("intercept", "target " + std::to_string(target.id) +
                            " not intercepted (closest approach " + std::to_string(d) + ")");
    } else {
      report.entries.push_back({"intercept", true, ""});
    }
  }

  for (const Interception& ic : sol.interceptions) {
    if (ic.target < 1 || ic.target > inst.targetCount()) {
      fail("interceptions", "unknown target " + std::to_string(ic.target));
      continue;
    }
    const Target& target = inst.targets[ic.target - 1];
    if (ic.window_index < 0 || ic.window_index >= static_cast<int>(target.windows.size())) {
      fail("interceptions", "unknown window for target " + std::to_string(ic.target));
      continue;
    }
    const TargetWindow& w = target.windows[ic.window_index];
    const double t_tol = opts.tol * std::max(1.0, std::abs(ic.time));
    if (ic.time < w.t0 - t_tol || ic.time > w.tf + t_tol ||
        distance(sol.trajectory.at(ic.time), w.at(ic.time)) > pos_tol) {
      fail("interceptions", "listed interception of target " + std::to_string(ic.target) +
                                " does not hold");
    }
  }
  return report;
}

}  // namespace mttspo

#endif  // MTTSPO_MODEL_HPP
