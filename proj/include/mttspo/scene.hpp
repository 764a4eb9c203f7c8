// Immutable per-instance substrate shared by every search: window-nodes,
// visibility graph, visible interval table (forward and time-reversed).

#ifndef MTTSPO_SCENE_HPP
#define MTTSPO_SCENE_HPP

#include <chrono>
#include <stdexcept>
#include <vector>

#include "mttspo/model.hpp"
#include "mttspo/visgraph.hpp"

namespace mttspo {

class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("time budget exhausted") {}
};

/// Wall-clock budget; a default-constructed deadline never expires.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(double seconds)
      : limited_(true),
        end_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(std::max(0.0, seconds)))) {}

  bool expired() const { return limited_ && Clock::now() >= end_; }
  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  bool limited_ = false;
  Clock::time_point end_{};
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(Deadline::Clock::now() - start_).count();
  }

 private:
  Deadline::Clock::time_point start_ = Deadline::Clock::now();
};

struct Scene {
  Instance instance;
  std::vector<WindowNode> nodes;  // nodes[0] is the depot
  VisibilityGraph graph;
  VisibleIntervalTable table;
  // vis(q, reversed(s)) = -vis(q, s), indexed like table.column(s).
  std::vector<std::vector<IntervalSet>> reversed_columns;
  std::vector<int> component;  // connected component of each graph node

  int nodeCount() const { return static_cast<int>(nodes.size()); }
  const ObstacleSet& obstacles() const { return instance.obstacles; }
  double vMax() const { return instance.v_max; }

  bool connected(int a, int b) const { return component[a] == component[b]; }
};

inline std::vector<int> graphComponents(const VisibilityGraph& g) {
  std::vector<int> comp(g.size(), -1);
  int next = 0;
  for (int s = 0; s < g.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const GraphEdge& e : g.adj[v]) {
        if (comp[e.to] < 0) {
          comp[e.to] = next;
          stack.push_back(e.to);
        }
      }
    }
    ++next;
  }
  return comp;
}

/// Validates the instance and computes the visibility products.
inline Scene buildScene(Instance inst) {
  validateInstance(inst);
  Scene scene;
  scene.instance = std::move(inst);
  scene.nodes = windowNodes(scene.instance);
  scene.graph = buildVisibilityGraph(scene.instance);
  scene.table = buildVisibleIntervalTable(scene.instance, scene.graph);
  scene.reversed_columns.resize(scene.nodes.size());
  for (const WindowNode& s : scene.nodes) {
    auto& col = scene.reversed_columns[s.id];
    col.reserve(scene.graph.size());
    for (const IntervalSet& set : scene.table.column(s.id)) col.push_back(set.negated());
  }
  scene.component = graphComponents(scene.graph);
  return scene;
}

}  // namespace mttspo

#endif  // MTTSPO_SCENE_HPP
