// Time window graph: directed edges between window-nodes labelled with the
// latest feasible departure time (LFDT) from the source window.

#ifndef MTTSPO_WINDOW_GRAPH_HPP
#define MTTSPO_WINDOW_GRAPH_HPP

#include <limits>
#include <ostream>
#include <vector>

#include "mttspo/planner.hpp"

namespace mttspo {

struct WindowEdge {
  int to = 0;
  double lfdt = 0.0;
};

struct TimeWindowGraph {
  std::vector<WindowNode> nodes;
  std::vector<std::vector<WindowEdge>> out;  // sorted by destination id
  // max_lfdt[u][i]: largest label on an edge from u into a window of target i
  // (index 0 is the depot); -inf if there is none.
  std::vector<std::vector<double>> max_lfdt;

  int nodeCount() const { return static_cast<int>(nodes.size()); }
  int targetCount() const {
    return max_lfdt.empty() ? 0 : static_cast<int>(max_lfdt[0].size()) - 1;
  }
  std::size_t edgeCount() const {
    std::size_t total = 0;
    for (const auto& e : out) total += e.size();
    return total;
  }
  std::optional<double> label(int u, int v) const {
    for (const WindowEdge& e : out[u]) {
      if (e.to == v) return e.lfdt;
    }
    return std::nullopt;
  }
};

/// Evaluates every ordered pair of window-nodes from different targets.
/// Throws TimeoutError if the deadline passes during construction.
inline TimeWindowGraph buildTimeWindowGraph(const Scene& scene, const Deadline& deadline = {}) {
  TimeWindowGraph gtw;
  gtw.nodes = scene.nodes;
  const int n = scene.nodeCount();
  const int targets = scene.instance.targetCount();
  gtw.out.assign(n, {});
  gtw.max_lfdt.assign(n, std::vector<double>(targets + 1, -kInf));
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      const WindowNode& a = scene.nodes[u];
      const WindowNode& b = scene.nodes[v];
      if (a.target == b.target) continue;
      deadline.check();
      if (auto t = lfdt(scene, a, b)) {
        gtw.out[u].push_back({v, *t});
        double& best = gtw.max_lfdt[u][b.target];
        best = std::max(best, *t);
      }
    }
  }
  return gtw;
}

/// Largest LFDT from `from` into any window of `target`, or -inf.
inline double maxLfdtToTarget(const TimeWindowGraph& gtw, int from, int target) {
  return gtw.max_lfdt[from][target];
}

inline void writeWindowGraphCsv(const TimeWindowGraph& gtw, std::ostream& os) {
  os << "u,v,lfdt\n";
  for (int u = 0; u < gtw.nodeCount(); ++u) {
    for (const WindowEdge& e : gtw.out[u]) os << u << "," << e.to << "," << e.lfdt << "\n";
  }
}

}  // namespace mttspo

#endif  // MTTSPO_WINDOW_GRAPH_HPP
