// Depth-first search over the trajectory tree: each tree node pairs a
// window-node sequence with a partial agent trajectory that intercepts the
// sequence in order. Successors come from the time window graph, partial
// tours that can no longer reach some unvisited target are pruned, and the
// first tour that returns to the depot is reported.

#ifndef MTTSPO_TOUR_SEARCH_HPP
#define MTTSPO_TOUR_SEARCH_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "mttspo/window_graph.hpp"

namespace mttspo {

/// Slack on successor condition 1 and the lookahead comparison, seconds.
inline constexpr double kTimeSlack = 1e-9;

struct TreeNode {
  std::vector<int> sequence;  // window-node ids, starting with the depot
  Trajectory trajectory;
  double T = 0.0;
  std::vector<char> visited;  // indexed by target id; [0] unused
  std::vector<Interception> interceptions;

  int last() const { return sequence.back(); }
  bool allVisited() const {
    return std::all_of(visited.begin() + 1, visited.end(), [](char c) { return c != 0; });
  }
};

inline TreeNode rootNode(const Scene& scene) {
  TreeNode root;
  root.sequence = {0};
  root.trajectory.push(0.0, scene.instance.depot);
  root.visited.assign(scene.instance.targetCount() + 1, 0);
  return root;
}

/// Window-nodes s' with an edge (s, s') whose LFDT is not earlier than T,
/// whose target is unvisited, and which is the depot only once every target
/// has been visited. Ascending id order.
inline std::vector<int> successorWindowNodes(const TreeNode& node, const TimeWindowGraph& gtw) {
  std::vector<int> out;
  const bool complete = node.allVisited();
  for (const WindowEdge& e : gtw.out[node.last()]) {
    if (node.T > e.lfdt + kTimeSlack) continue;
    const int target = gtw.nodes[e.to].target;
    if (target == 0) {
      if (complete) out.push_back(e.to);
    } else if (!node.visited[target]) {
      out.push_back(e.to);
    }
  }
  return out;
}

/// False iff some unvisited target can no longer be reached in time from
/// window-node `last` at time T.
inline bool lookahead(int last, const std::vector<char>& visited, double T,
                      const TimeWindowGraph& gtw) {
  for (int i = 1; i < static_cast<int>(visited.size()); ++i) {
    if (!visited[i] && T > maxLfdtToTarget(gtw, last, i) + kTimeSlack) return false;
  }
  return true;
}

/// Appends `tail` to `tau`; the tail must start where and when tau ends.
inline Trajectory concatenate(const Trajectory& tau, const Trajectory& tail) {
  if (tau.empty()) return tail;
  if (tail.empty()) return tau;
  const Waypoint& a = tau.waypoints.back();
  const Waypoint& b = tail.waypoints.front();
  const double tol = 1e-9 * std::max({1.0, std::abs(a.t), norm(a.p)});
  if (std::abs(a.t - b.t) > tol || distance(a.p, b.p) > tol) {
    throw std::logic_error("trajectory junction mismatch");
  }
  Trajectory out = tau;
  for (std::size_t k = 1; k < tail.waypoints.size(); ++k) {
    out.push(tail.waypoints[k].t, tail.waypoints[k].p);
  }
  return out;
}

enum class SolveStatus { Feasible, Infeasible, Timeout };

inline const char* toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible:
      return "FEASIBLE";
    case SolveStatus::Infeasible:
      return "INFEASIBLE";
    case SolveStatus::Timeout:
      return "TIMEOUT";
  }
  return "?";
}

struct SearchStats {
  long nodes_popped = 0;
  long astar_calls = 0;
  long prunes = 0;
};

struct SearchOptions {
  bool lookahead = true;
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
};

struct SearchResult {
  SolveStatus status = SolveStatus::Infeasible;
  Solution solution;
  SearchStats stats;
};

namespace detail {

inline void checkTreeNode(const Scene& scene, const TreeNode& node) {
  const auto& wp = node.trajectory.waypoints;
  auto fail = [](const std::string& what) {
    throw std::logic_error("trajectory tree invariant: " + what);
  };
  if (wp.empty() || wp.front().t != 0.0 || wp.front().p != scene.instance.depot) {
    fail("does not start at the depot at t=0");
  }
  if (wp.back().t != node.T) fail("T differs from the last waypoint time");
  const double tol = 1e-6 * scene.instance.scale();
  double prev = 0.0;
  for (const Interception& ic : node.interceptions) {
    const TargetWindow& w = scene.instance.targets[ic.target - 1].windows[ic.window_index];
    if (ic.time < prev - 1e-9 || ic.time < w.t0 - 1e-9 || ic.time > w.tf + 1e-9 ||
        distance(node.trajectory.at(ic.time), w.at(ic.time)) > tol) {
      fail("interception of target " + std::to_string(ic.target) + " does not hold");
    }
    prev = ic.time;
  }
}

}  // namespace detail

/// First feasible tour in DFS order. Successors of a popped node are pushed
/// so that the earliest resulting final time is popped first (ties: lower
/// window-node id first). Throws nothing on timeout; reports TIMEOUT.
inline SearchResult dfsSolve(const Scene& scene, const TimeWindowGraph& gtw,
                             const Deadline& deadline = {}, SearchOptions opts = {}) {
  SearchResult result;
  if (scene.instance.targetCount() == 0) {
    result.status = SolveStatus::Feasible;
    result.solution.trajectory.push(0.0, scene.instance.depot);
    result.solution.final_time = 0.0;
    return result;
  }

  struct Child {
    double T;
    int id;
    Trajectory tail;
  };
  std::vector<TreeNode> stack{rootNode(scene)};
  try {
    while (!stack.empty()) {
      deadline.check();
      TreeNode node = std::move(stack.back());
      stack.pop_back();
      ++result.stats.nodes_popped;
      if (opts.check_invariants) detail::checkTreeNode(scene, node);

      const std::vector<int> succ = successorWindowNodes(node, gtw);
      if (succ.empty()) continue;
      const StartLink start = linkStart(node.trajectory.endPoint(), scene.graph, scene.obstacles());
      std::vector<Child> children;
      for (int id : succ) {
        deadline.check();
        const WindowNode& s = scene.nodes[id];
        ++result.stats.astar_calls;
        PlanResult plan = planToWindow(scene, start, node.T, s);
        if (!plan.feasible()) continue;
        if (s.isDepot()) {
          result.status = SolveStatus::Feasible;
          result.solution.trajectory = concatenate(node.trajectory, plan.trajectory);
          result.solution.final_time = result.solution.trajectory.endTime();
          result.solution.interceptions = node.interceptions;
          return result;
        }
        if (opts.lookahead) {
          std::vector<char> visited = node.visited;
          visited[s.target] = 1;
          if (!lookahead(id, visited, plan.arrival, gtw)) {
            ++result.stats.prunes;
            continue;
          }
        }
        children.push_back({plan.arrival, id, std::move(plan.trajectory)});
      }
      std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
        if (a.T != b.T) return a.T > b.T;
        return a.id > b.id;
      });
      for (Child& c : children) {
        const WindowNode& s = scene.nodes[c.id];
        TreeNode next;
        next.sequence = node.sequence;
        next.sequence.push_back(c.id);
        next.trajectory = concatenate(node.trajectory, c.tail);
        next.T = next.trajectory.endTime();
        next.visited = node.visited;
        next.visited[s.target] = 1;
        next.interceptions = node.interceptions;
        next.interceptions.push_back({s.target, s.window_index, next.T});
        stack.push_back(std::move(next));
      }
    }
  } catch (const TimeoutError&) {
    result.status = SolveStatus::Timeout;
    return result;
  }
  result.status = SolveStatus::Infeasible;
  return result;
}

}  // namespace mttspo

#endif  // MTTSPO_TOUR_SEARCH_HPP
