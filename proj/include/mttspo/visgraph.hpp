// Static visibility graph over convex obstacle vertices, the depot and the
// window endpoints of every target, plus the table of visible interval sets
// from each graph node to each window-node.

#ifndef MTTSPO_VISGRAPH_HPP
#define MTTSPO_VISGRAPH_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <vector>

#include "mttspo/geometry.hpp"
#include "mttspo/model.hpp"

namespace mttspo {

struct GraphEdge {
  int to = 0;
  double length = 0.0;
};

struct VisibilityGraph {
  std::vector<Point> nodes;
  std::vector<std::vector<GraphEdge>> adj;
  int depot_node = -1;
  // Indexed by window-node id; entry 0 (the depot) maps to depot_node.
  std::vector<int> window_start_node;
  std::vector<int> window_end_node;
  std::map<Point, int> index;

  int size() const { return static_cast<int>(nodes.size()); }

  std::optional<int> find(Point p) const {
    auto it = index.find(p);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  bool hasEdge(int a, int b) const {
    return std::any_of(adj[a].begin(), adj[a].end(),
                       [b](const GraphEdge& e) { return e.to == b; });
  }
};

/// Nodes: convex obstacle vertices, the depot, then window start/end
/// positions in window-node order; coincident points share one node.
/// Edges join every mutually visible pair.
inline VisibilityGraph buildVisibilityGraph(const Instance& inst) {
  VisibilityGraph g;
  auto intern = [&g](Point p) {
    auto [it, inserted] = g.index.emplace(p, static_cast<int>(g.nodes.size()));
    if (inserted) g.nodes.push_back(p);
    return it->second;
  };
  for (Point v : inst.obstacles.convex_vertices) intern(v);
  g.depot_node = intern(inst.depot);
  const std::vector<WindowNode> wn = windowNodes(inst);
  g.window_start_node.assign(wn.size(), g.depot_node);
  g.window_end_node.assign(wn.size(), g.depot_node);
  for (std::size_t k = 1; k < wn.size(); ++k) {
    g.window_start_node[k] = intern(wn[k].startPosition());
    g.window_end_node[k] = intern(wn[k].endPosition());
  }

  const int n = g.size();
  g.adj.assign(n, {});
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (segmentIsFree(g.nodes[a], g.nodes[b], inst.obstacles)) {
        const double len = distance(g.nodes[a], g.nodes[b]);
        g.adj[a].push_back({b, len});
        g.adj[b].push_back({a, len});
      }
    }
  }
  return g;
}

/// vis(q, s) for every graph node q and window-node s.
class VisibleIntervalTable {
 public:
  VisibleIntervalTable() = default;
  VisibleIntervalTable(int windows, int positions)
      : sets_(windows, std::vector<IntervalSet>(positions)) {}

  const IntervalSet& at(int q, int s) const { return sets_[s][q]; }
  IntervalSet& at(int q, int s) { return sets_[s][q]; }
  /// All entries for window-node s, indexed by graph node.
  const std::vector<IntervalSet>& column(int s) const { return sets_[s]; }
  int windowCount() const { return static_cast<int>(sets_.size()); }
  int positionCount() const { return sets_.empty() ? 0 : static_cast<int>(sets_[0].size()); }

 private:
  std::vector<std::vector<IntervalSet>> sets_;
};

/// Visible intervals of a window-node from an arbitrary point. The depot
/// (a stationary target with unbounded window) is all-or-nothing.
inline IntervalSet visibleIntervals(Point q, const WindowNode& s, const ObstacleSet& obs) {
  if (s.vel.x == 0.0 && s.vel.y == 0.0 && (std::isinf(s.t0) || std::isinf(s.tf))) {
    IntervalSet out;
    if (segmentIsFree(q, s.p0, obs)) out.add({s.t0, s.tf});
    return out;
  }
  return visibleSubIntervals(q, s.motion(), obs);
}

inline VisibleIntervalTable buildVisibleIntervalTable(const Instance& inst,
                                                      const VisibilityGraph& g) {
  const std::vector<WindowNode> wn = windowNodes(inst);
  VisibleIntervalTable table(static_cast<int>(wn.size()), g.size());
  for (const WindowNode& s : wn) {
    for (int q = 0; q < g.size(); ++q) {
      table.at(q, s.id) = visibleIntervals(g.nodes[q], s, inst.obstacles);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Shortest obstacle-avoiding paths between free points.

/// A free point joined to the graph nodes it can see.
struct AttachedPoint {
  Point p;
  int node = -1;  // graph node at p, if any
  std::vector<GraphEdge> visible;
};

/// All-pairs shortest paths on the visibility graph, extended to free points
/// by temporary insertion.
class PathOracle {
 public:
  PathOracle(const VisibilityGraph& g, const ObstacleSet& obs) : g_(&g), obs_(&obs) {
    const int n = g.size();
    dist_.assign(static_cast<std::size_t>(n) * n, kInf);
    pred_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int s = 0; s < n; ++s) dijkstra(s);
  }

  const VisibilityGraph& graph() const { return *g_; }

  double nodeDistance(int a, int b) const { return dist_[idx(a, b)]; }

  AttachedPoint attach(Point p) const {
    AttachedPoint ap;
    ap.p = p;
    if (auto node = g_->find(p)) {
      ap.node = *node;
      ap.visible.push_back({*node, 0.0});
      for (const GraphEdge& e : g_->adj[*node]) ap.visible.push_back(e);
      return ap;
    }
    for (int q = 0; q < g_->size(); ++q) {
      if (segmentIsFree(p, g_->nodes[q], *obs_)) {
        ap.visible.push_back({q, mttspo::distance(p, g_->nodes[q])});
      }
    }
    return ap;
  }

  /// Shortest distance from `a` to every graph node.
  std::vector<double> distancesFrom(const AttachedPoint& a) const {
    std::vector<double> out(g_->size(), kInf);
    for (const GraphEdge& e : a.visible) {
      const double* row = &dist_[idx(e.to, 0)];
      for (int q = 0; q < g_->size(); ++q) {
        out[q] = std::min(out[q], e.length + row[q]);
      }
    }
    return out;
  }

  /// Shortest distance from a to b given distancesFrom(a).
  double distance(const AttachedPoint& a, const std::vector<double>& from_a,
                  const AttachedPoint& b) const {
    if (a.p == b.p) return 0.0;
    double best = kInf;
    for (const GraphEdge& e : b.visible) best = std::min(best, from_a[e.to] + e.length);
    const double direct = mttspo::distance(a.p, b.p);
    if (direct < best && segmentIsFree(a.p, b.p, *obs_)) best = direct;
    return best;
  }

  double distance(const AttachedPoint& a, const AttachedPoint& b) const {
    return distance(a, distancesFrom(a), b);
  }

  double distance(Point a, Point b) const { return distance(attach(a), attach(b)); }

  /// Polyline of a shortest path from a to b (empty if unreachable).
  std::vector<Point> path(const AttachedPoint& a, const AttachedPoint& b) const {
    if (a.p == b.p) return {a.p};
    const double direct = mttspo::distance(a.p, b.p);
    double best = kInf;
    int ea = -1, eb = -1;
    for (const GraphEdge& x : a.visible) {
      for (const GraphEdge& y : b.visible) {
        const double d = x.length + dist_[idx(x.to, y.to)] + y.length;
        if (d < best) {
          best = d;
          ea = x.to;
          eb = y.to;
        }
      }
    }
    if (direct <= best && segmentIsFree(a.p, b.p, *obs_)) return {a.p, b.p};
    if (ea < 0 || best == kInf) return {};
    std::vector<Point> out{a.p};
    std::vector<int> chain{eb};
    while (chain.back() != ea) chain.push_back(pred_[idx(ea, chain.back())]);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (g_->nodes[*it] != out.back()) out.push_back(g_->nodes[*it]);
    }
    if (b.p != out.back()) out.push_back(b.p);
    return out;
  }

  std::vector<Point> path(Point a, Point b) const { return path(attach(a), attach(b)); }

 private:
  std::size_t idx(int a, int b) const {
    return static_cast<std::size_t>(a) * g_->size() + b;
  }

  void dijkstra(int source) {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist_[idx(source, source)] = 0.0;
    open.push({0.0, source});
    while (!open.empty()) {
      auto [d, v] = open.top();
      open.pop();
      if (d > dist_[idx(source, v)]) continue;
      for (const GraphEdge& e : g_->adj[v]) {
        const double nd = d + e.length;
        if (nd < dist_[idx(source, e.to)]) {
          dist_[idx(source, e.to)] = nd;
          pred_[idx(source, e.to)] = v;
          open.push({nd, e.to});
        }
      }
    }
  }

  const VisibilityGraph* g_;
  const ObstacleSet* obs_;
  std::vector<double> dist_;
  std::vector<int> pred_;
};

// ---------------------------------------------------------------------------
// Debug dumps

inline void writeDot(const VisibilityGraph& g, std::ostream& os) {
  os << "graph visibility {\n";
  for (int v = 0; v < g.size(); ++v) {
    os << "  n" << v << " [pos=\"" << g.nodes[v].x << "," << g.nodes[v].y << "!\"";
    if (v == g.depot_node) os << ", shape=box";
    os << "];\n";
  }
  for (int v = 0; v < g.size(); ++v) {
    for (const GraphEdge& e : g.adj[v]) {
      if (e.to > v) os << "  n" << v << " -- n" << e.to << " [len=" << e.length << "];\n";
    }
  }
  os << "}\n";
}

/// Rows `q_id,s_id,intervals` with intervals as `lo:hi` joined by spaces.
inline void writeIntervalTableCsv(const VisibleIntervalTable& table, std::ostream& os) {
  os << "q_id,s_id,intervals\n";
  for (int s = 0; s < table.windowCount(); ++s) {
    for (int q = 0; q < table.positionCount(); ++q) {
      os << q << "," << s << ",";
      bool first = true;
      for (const Interval& iv : table.at(q, s)) {
        if (!first) os << " ";
        os << iv.lo << ":" << iv.hi;
        first = false;
      }
      os << "\n";
    }
  }
}

}  // namespace mttspo

#endif  // MTTSPO_VISGRAPH_HPP
