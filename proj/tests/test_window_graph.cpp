#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mttspo/window_graph.hpp"
#include "oracles.hpp"

using namespace mttspo;
using oracle::makeInstance;
using oracle::stationaryTarget;

TEST(WindowGraph, DepotOnly) {
  const Scene scene = buildScene(makeInstance({}, {0, 0}, 1.0, {}));
  const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
  EXPECT_EQ(gtw.nodeCount(), 1);
  EXPECT_EQ(gtw.edgeCount(), 0u);
}

TEST(WindowGraph, CoLocatedOverlappingWindows) {
  const Scene scene = buildScene(makeInstance(
      {}, {3, 3}, 1.0, {stationaryTarget(1, {1, 1}, 0, 10), stationaryTarget(2, {1, 1}, 5, 20)}));
  const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
  EXPECT_DOUBLE_EQ(*gtw.label(1, 2), 10.0);
  EXPECT_DOUBLE_EQ(*gtw.label(2, 1), 10.0);
  // Same-target and depot self pairs are skipped.
  EXPECT_FALSE(gtw.label(0, 0).has_value());
  EXPECT_DOUBLE_EQ(*gtw.label(1, 0), 10.0);
  EXPECT_DOUBLE_EQ(*gtw.label(2, 0), 20.0);
}

TEST(WindowGraph, LabelsLieInSourceWindow) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 10; ++k) {
    const Instance inst = oracle::randomInstance(rng, 10, 10, 0.2, 4, 2, 20.0, 1.0, 6.0);
    const Scene scene = buildScene(inst);
    const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
    for (int u = 0; u < gtw.nodeCount(); ++u) {
      for (const WindowEdge& e : gtw.out[u]) {
        EXPECT_GE(e.lfdt, gtw.nodes[u].t0);
        EXPECT_LE(e.lfdt, gtw.nodes[u].tf);
        EXPECT_NE(gtw.nodes[u].target, gtw.nodes[e.to].target);
      }
    }
  }
}

TEST(WindowGraph, EdgesMatchDepartureScan) {
  std::mt19937_64 rng(53);
  const double step = 1e-2;
  int compared = 0;
  for (int k = 0; k < 4; ++k) {
    const Instance inst = oracle::randomInstance(rng, 10, 10, 0.2, 5, 1, 15.0, 1.0, 5.0);
    const Scene scene = buildScene(inst);
    const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
    const PathOracle paths(scene.graph, scene.obstacles());
    for (int u = 1; u < gtw.nodeCount(); ++u) {
      for (int v = 1; v < gtw.nodeCount(); ++v) {
        if (scene.nodes[u].target == scene.nodes[v].target) continue;
        const auto scan = oracle::scannedLfdt(scene, paths, scene.nodes[u], scene.nodes[v], step);
        const auto label = gtw.label(u, v);
        if (scan) {
          ASSERT_TRUE(label.has_value());
          EXPECT_GE(*label, *scan - 1e-9);
          EXPECT_LE(*label, *scan + step + 1e-9);
        } else if (label) {
          // Only a departure window narrower than one scan step can be missed.
          EXPECT_LT(*label - scene.nodes[u].t0, step);
        }
        ++compared;
      }
    }
  }
  EXPECT_EQ(compared, 4 * 20);
}

TEST(WindowGraph, MaxLfdtIsBruteForceMax) {
  Target multi;
  multi.id = 2;
  multi.windows = {{2, 4, {5, 0}, {0, 0}}, {9, 12, {5, 0}, {0, 0}}};
  const Scene scene = buildScene(makeInstance(
      {}, {0, 0}, 1.0, {stationaryTarget(1, {0, 0}, 0, 20), multi, stationaryTarget(3, {40, 0}, 0, 1)}));
  const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
  // From target 1's window: (5,0) cannot be reached by 4, but by 12 when
  // leaving at 7.
  EXPECT_FALSE(gtw.label(1, 2).has_value());
  EXPECT_DOUBLE_EQ(*gtw.label(1, 3), 7.0);
  for (int u = 0; u < gtw.nodeCount(); ++u) {
    for (int target = 0; target <= 3; ++target) {
      double best = -kInf;
      for (int v = 0; v < gtw.nodeCount(); ++v) {
        if (gtw.nodes[v].target != target) continue;
        if (auto l = gtw.label(u, v)) best = std::max(best, *l);
      }
      EXPECT_EQ(maxLfdtToTarget(gtw, u, target), best);
    }
  }
  EXPECT_DOUBLE_EQ(maxLfdtToTarget(gtw, 1, 2), 7.0);
  EXPECT_EQ(maxLfdtToTarget(gtw, 1, 3), -kInf);
}

TEST(WindowGraph, DepartingAtLabelReachesWindowEnd) {
  std::mt19937_64 rng(57);
  for (int k = 0; k < 6; ++k) {
    const Instance inst = oracle::randomInstance(rng, 10, 10, 0.2, 4, 2, 15.0, 1.0, 6.0);
    const Scene scene = buildScene(inst);
    const TimeWindowGraph gtw = buildTimeWindowGraph(scene);
    const PathOracle paths(scene.graph, scene.obstacles());
    for (int u = 0; u < gtw.nodeCount(); ++u) {
      for (const WindowEdge& e : gtw.out[u]) {
        const WindowNode& a = gtw.nodes[u];
        const WindowNode& b = gtw.nodes[e.to];
        if (b.isDepot()) continue;
        // Replay at full speed along the shortest path to b's window-end
        // position and validate the legs.
        const std::vector<Point> path = paths.path(a.at(e.lfdt), b.endPosition());
        ASSERT_FALSE(path.empty()) << "edge " << u << "->" << e.to;
        double t = e.lfdt;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          EXPECT_TRUE(segmentIsFree(path[i], path[i + 1], scene.obstacles()));
          t += distance(path[i], path[i + 1]) / scene.vMax();
        }
        EXPECT_LE(t, b.tf + 1e-9);
      }
    }
  }
}

TEST(WindowGraph, RemovingObstaclesKeepsEdges) {
  std::mt19937_64 rng(59);
  for (int k = 0; k < 6; ++k) {
    const Instance inst = oracle::randomInstance(rng, 10, 10, 0.2, 4, 2, 15.0, 1.0, 6.0);
    Instance open = inst;
    open.grid.occupied.clear();
    open.obstacles = ObstacleSet{};
    const TimeWindowGraph with = buildTimeWindowGraph(buildScene(inst));
    const TimeWindowGraph without = buildTimeWindowGraph(buildScene(open));
    for (int u = 0; u < with.nodeCount(); ++u) {
      for (const WindowEdge& e : with.out[u]) {
        const auto l = without.label(u, e.to);
        ASSERT_TRUE(l.has_value());
        EXPECT_GE(*l, e.lfdt - 1e-9);
      }
    }
  }
}

TEST(WindowGraph, CsvDump) {
  const Scene scene = buildScene(makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {3, 0}, 2, 7)}));
  std::ostringstream os;
  writeWindowGraphCsv(buildTimeWindowGraph(scene), os);
  EXPECT_EQ(os.str(), "u,v,lfdt\n0,1,4\n1,0,7\n");
}

TEST(WindowGraph, HonoursDeadline) {
  std::mt19937_64 rng(61);
  const Instance inst = oracle::randomInstance(rng, 10, 10, 0.2, 6, 2, 15.0, 1.0, 6.0);
  const Scene scene = buildScene(inst);
  EXPECT_THROW(buildTimeWindowGraph(scene, Deadline(0.0)), TimeoutError);
}
