// Point-to-moving-target planning on the moving target visibility graph
// (MTVG): closed-form straight-line interception, graph assembly, A* with a
// time-dependent goal edge, trajectory reconstruction, and latest feasible
// departure times computed by running the same search in reversed time.

#ifndef MTTSPO_PLANNER_HPP
#define MTTSPO_PLANNER_HPP

#include <cmath>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "mttspo/scene.hpp"

namespace mttspo {

// ---------------------------------------------------------------------------
// Straight-line interception

/// Shortest feasible travel: minimum t_s - t over t_s in I (and t_s >= t)
/// such that a straight move at speed <= v_max from (q, t) reaches the
/// target at t_s. Returns +inf when no such t_s exists.
inline double sft(Point q, double t, const WindowNode& s, Interval I, double v_max) {
  const double lo = std::max(I.lo, t);
  const double hi = I.hi;
  if (lo > hi) return kInf;
  const double d0 = lo - t;  // travel time already available at lo
  const Vec2 w = s.at(lo) - q;
  const double c0 = dot(w, w);
  const double reach = v_max * d0;
  if (c0 <= reach * reach) return d0;

  // |w + vel*x| <= v_max*(d0 + x) for the smallest x in [0, hi - lo]:
  // a x^2 + 2 b x + c <= 0.
  const double v2 = v_max * v_max;
  const double a = dot(s.vel, s.vel) - v2;
  const double b = dot(w, s.vel) - v2 * d0;
  const double c = c0 - reach * reach;  // > 0 here
  double x = kInf;
  const double scale = b * b + std::abs(a * c);
  double disc = b * b - a * c;
  if (std::abs(disc) <= 1e-12 * scale) disc = 0.0;
  if (a < 0.0) {
    const double root = std::sqrt(disc);
    x = b >= 0.0 ? (b + root) / -a : c / (root - b);
  } else if (a == 0.0) {
    if (b < 0.0) x = c / (-2.0 * b);
  } else if (disc >= 0.0 && b < 0.0) {
    x = c / (std::sqrt(disc) - b);
  }
  if (!std::isfinite(x) || x < 0.0) return kInf;
  const double span = hi - lo;
  if (x > span) {
    if (x - span > 1e-9 * std::max(1.0, std::abs(hi))) return kInf;
    x = span;
  }
  return d0 + x;
}

/// Cost of the goal edge (q, s) when departing q at t: the best SFT over the
/// visible intervals of s from q.
inline double edgeCostToGoal(Point q, const WindowNode& s, double t,
                             const IntervalSet& vis_qs, double v_max) {
  // Intervals are disjoint and sorted, so the first reachable one is best.
  for (const Interval& iv : vis_qs) {
    const double d = sft(q, t, s, iv, v_max);
    if (d < kInf) return d;
  }
  return kInf;
}

/// Distance from v to the spatial path of s over its window, over v_max.
inline double heuristic(Point v, const WindowNode& s, double v_max) {
  if (s.vel.x == 0.0 && s.vel.y == 0.0) return distance(v, s.p0) / v_max;
  return pointSegmentDistance(v, s.startPosition(), s.endPosition()) / v_max;
}

// ---------------------------------------------------------------------------
// Moving target visibility graph

/// A start point joined to the base graph: either an existing node, or a new
/// node with edges to every visible base node.
struct StartLink {
  Point p;
  int node = -1;  // base node id; equals graph size when p is new
  bool is_new = false;
  std::vector<GraphEdge> edges;  // E_p, only when is_new
};

inline StartLink linkStart(Point p, const VisibilityGraph& g, const ObstacleSet& obs) {
  if (pointInInterior(p, obs)) throw InputError("start point lies inside an obstacle");
  StartLink link;
  link.p = p;
  if (auto node = g.find(p)) {
    link.node = *node;
    return link;
  }
  link.is_new = true;
  link.node = g.size();
  for (int q = 0; q < g.size(); ++q) {
    if (segmentIsFree(p, g.nodes[q], obs)) link.edges.push_back({q, distance(p, g.nodes[q])});
  }
  return link;
}

struct Mtvg {
  const VisibilityGraph* base = nullptr;
  const StartLink* start = nullptr;
  WindowNode goal;
  std::span<const IntervalSet> base_vis;  // vis(q, goal) for base nodes
  IntervalSet start_vis;                  // vis(p, goal) when the start is new

  int positionCount() const { return base->size() + (start->is_new ? 1 : 0); }
  int goalId() const { return positionCount(); }
  Point position(int v) const {
    return v < base->size() ? base->nodes[v] : start->p;
  }
  const IntervalSet& goalVis(int v) const {
    return v < base->size() ? base_vis[v] : start_vis;
  }
  /// Goal edges E_s: position nodes with a non-empty visible interval set.
  std::vector<int> goalEdges() const {
    std::vector<int> out;
    for (int v = 0; v < positionCount(); ++v) {
      if (!goalVis(v).empty()) out.push_back(v);
    }
    return out;
  }
};

/// Assembles the MTVG for start p and goal s. vis(p, s) is computed from the
/// obstacles only when p is not already a graph node.
inline Mtvg constructMtvg(const StartLink& start, const WindowNode& goal,
                          const VisibilityGraph& g, std::span<const IntervalSet> base_vis,
                          const ObstacleSet& obs) {
  Mtvg m;
  m.base = &g;
  m.start = &start;
  m.goal = goal;
  m.base_vis = base_vis;
  if (start.is_new) m.start_vis = visibleIntervals(start.p, goal, obs);
  return m;
}

// ---------------------------------------------------------------------------
// A* search

enum class PlanStatus { Feasible, Infeasible };

struct PlanResult {
  PlanStatus status = PlanStatus::Infeasible;
  Trajectory trajectory;
  double arrival = kInf;
  std::vector<int> path;  // MTVG node ids from start to goal
  int expansions = 0;

  bool feasible() const { return status == PlanStatus::Feasible; }
};

struct ExpansionRecord {
  int node = 0;
  double g = 0.0;
  double f = 0.0;
  int parent = -1;
};

/// Moves at v_max through the position nodes of `path`, then takes the
/// straight interception leg, arriving at `arrival`.
inline Trajectory constructTrajectory(const Mtvg& m, const std::vector<int>& path, double T,
                                      const std::vector<double>& g, double arrival) {
  Trajectory traj;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    traj.push(T + g[path[i]], m.position(path[i]));
  }
  const double t_hit = std::clamp(arrival, m.goal.t0, m.goal.tf);
  traj.push(arrival, m.goal.at(t_hit));
  return traj;
}

/// A* from (p, T) to the goal window-node. Position-node edges cost
/// length / v_max; goal edges cost edgeCostToGoal at the departure time.
/// Nodes whose arrival would exceed the goal's window end are not opened.
/// Ties on f go to the larger g, then the smaller node id.
inline PlanResult pointToMovingTargetSearch(const Mtvg& m, double T, double v_max,
                                            std::vector<ExpansionRecord>* trace = nullptr) {
  const int n = m.positionCount() + 1;
  const int goal = m.goalId();
  const int source = m.start->node;
  const double cap = m.goal.tf - T;
  const double cap_tol = 1e-9 * std::max(1.0, std::abs(m.goal.tf));
  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);
  auto h = [&](int v) { return v == goal ? 0.0 : heuristic(m.position(v), m.goal, v_max); };

  struct Entry {
    double f, g;
    int id;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

  PlanResult result;
  g[source] = 0.0;
  open.push({h(source), 0.0, source});
  double f_goal = kInf;
  auto relax = [&](int from, int to, double cost) {
    const double gc = g[from] + cost;
    const double limit = to == goal ? cap + cap_tol : cap;
    if (gc < g[to] && !closed[to] && gc <= limit) {
      g[to] = gc;
      parent[to] = from;
      const double f = gc + h(to);
      open.push({f, gc, to});
      if (to == goal) f_goal = f;
    }
  };

  while (true) {
    while (!open.empty() && (closed[open.top().id] || open.top().g != g[open.top().id])) {
      open.pop();
    }
    if (open.empty() || !(f_goal > open.top().f)) break;
    const Entry top = open.top();
    open.pop();
    const int v = top.id;
    closed[v] = 1;
    ++result.expansions;
    if (trace) trace->push_back({v, g[v], top.f, parent[v]});

    const Point pv = m.position(v);
    if (v == m.base->size() && m.start->is_new) {
      for (const GraphEdge& e : m.start->edges) relax(v, e.to, e.length / v_max);
    } else {
      for (const GraphEdge& e : m.base->adj[v]) relax(v, e.to, e.length / v_max);
    }
    const IntervalSet& vis = m.goalVis(v);
    if (!vis.empty()) relax(v, goal, edgeCostToGoal(pv, m.goal, T + g[v], vis, v_max));
  }

  if (!(f_goal < kInf)) return result;
  for (int v = goal; v != -1; v = parent[v]) result.path.push_back(v);
  std::reverse(result.path.begin(), result.path.end());
  // Arrival measured from the last departure so the final leg's timing is
  // exactly the one evaluated by the goal edge.
  const int last = result.path[result.path.size() - 2];
  const double depart = T + g[last];
  result.arrival = depart + edgeCostToGoal(m.position(last), m.goal, depart, m.goalVis(last), v_max);
  result.status = PlanStatus::Feasible;
  result.trajectory = constructTrajectory(m, result.path, T, g, result.arrival);
  return result;
}

inline void writeTraceCsv(const std::vector<ExpansionRecord>& trace, std::ostream& os) {
  os << "node,g,f,parent\n";
  for (const ExpansionRecord& r : trace) {
    os << r.node << "," << r.g << "," << r.f << "," << r.parent << "\n";
  }
}

// ---------------------------------------------------------------------------
// Scene-level entry points

/// Earliest interception of window-node s starting from (p, T).
inline PlanResult planToWindow(const Scene& scene, const StartLink& start, double T,
                               const WindowNode& s,
                               std::vector<ExpansionRecord>* trace = nullptr) {
  const Mtvg m = constructMtvg(start, s, scene.graph, scene.table.column(s.id), scene.obstacles());
  return pointToMovingTargetSearch(m, T, scene.vMax(), trace);
}

inline PlanResult planToWindow(const Scene& scene, Point p, double T, const WindowNode& s) {
  const StartLink start = linkStart(p, scene.graph, scene.obstacles());
  return planToWindow(scene, start, T, s);
}

/// Latest departure from window-node u (leaving targ(u)'s position at the
/// departure time) that still reaches `dest` by `dest_time`. Solved as the
/// earliest interception of reversed(u) from (dest, -dest_time).
inline std::optional<double> latestDeparture(const Scene& scene, const WindowNode& u,
                                             Point dest, double dest_time) {
  const StartLink start = linkStart(dest, scene.graph, scene.obstacles());
  const WindowNode goal = reversed(u);
  const Mtvg m = constructMtvg(start, goal, scene.graph, scene.reversed_columns[u.id],
                               scene.obstacles());
  const PlanResult r = pointToMovingTargetSearch(m, -dest_time, scene.vMax());
  if (!r.feasible()) return std::nullopt;
  return std::clamp(-r.arrival, u.t0, u.tf);
}

/// Latest feasible departure time from u such that targ(v) is met at tf(v).
/// For v = depot there is no deadline: the edge exists iff the depot is
/// reachable from u's window, and then the latest departure is tf(u).
inline std::optional<double> lfdt(const Scene& scene, const WindowNode& u, const WindowNode& v) {
  if (v.isDepot()) {
    if (u.isDepot()) return std::nullopt;
    const int end_node = scene.graph.window_end_node[u.id];
    if (!scene.connected(end_node, scene.graph.depot_node)) return std::nullopt;
    return u.tf;
  }
  return latestDeparture(scene, u, v.endPosition(), v.tf);
}

}  // namespace mttspo

#endif  // MTTSPO_PLANNER_HPP
