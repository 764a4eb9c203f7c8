#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mttspo/analysis.hpp"
#include "mttspo/generator.hpp"
#include "oracles.hpp"

using namespace mttspo;
using oracle::makeInstance;
using oracle::stationaryTarget;

namespace {

struct Prepared {
  Scene scene;
  TimeWindowGraph gtw;
};

Prepared prepare(const Instance& inst) {
  Prepared p{buildScene(inst), {}};
  p.gtw = buildTimeWindowGraph(p.scene);
  return p;
}

// Every ordering and window choice, chained forward without any pruning.
std::set<WindowSequence> bruteForceSequences(const Scene& scene) {
  std::set<WindowSequence> out;
  const int n = scene.instance.targetCount();
  std::vector<char> used(n + 1, 0);
  WindowSequence seq{0};
  std::function<void(Point, double)> go = [&](Point p, double T) {
    if (static_cast<int>(seq.size()) == n + 1) {
      if (planToWindow(scene, p, T, scene.nodes[0]).feasible()) {
        WindowSequence full = seq;
        full.push_back(0);
        out.insert(full);
      }
      return;
    }
    for (const WindowNode& s : scene.nodes) {
      if (s.isDepot() || used[s.target]) continue;
      const PlanResult r = planToWindow(scene, p, T, s);
      if (!r.feasible()) continue;
      used[s.target] = 1;
      seq.push_back(s.id);
      go(r.trajectory.endPoint(), r.arrival);
      seq.pop_back();
      used[s.target] = 0;
    }
  };
  go(scene.instance.depot, 0.0);
  return out;
}

}  // namespace

TEST(Sequences, ZeroTargets) {
  const Prepared p = prepare(makeInstance({}, {1, 1}, 1.0, {}));
  EXPECT_EQ(enumerateFeasibleSequences(p.scene, p.gtw), (std::vector<WindowSequence>{{0, 0}}));
}

TEST(Sequences, SingleReachableWindow) {
  const Prepared p = prepare(makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {3, 0}, 1, 8)}));
  EXPECT_EQ(enumerateFeasibleSequences(p.scene, p.gtw), (std::vector<WindowSequence>{{0, 1, 0}}));
}

TEST(Sequences, CapIsEnforced) {
  std::vector<Target> targets;
  for (int i = 1; i <= 11; ++i) targets.push_back(stationaryTarget(i, {1.0 * i, 0}, 0, 100));
  const Prepared p = prepare(makeInstance({}, {0, 0}, 1.0, targets));
  EXPECT_THROW(enumerateFeasibleSequences(p.scene, p.gtw), CapabilityLimit);
  EXPECT_THROW(usableFraction(p.scene, p.gtw), CapabilityLimit);
}

TEST(Sequences, MatchBruteForce) {
  std::mt19937_64 rng(131);
  int nonempty = 0;
  for (int k = 0; k < 12; ++k) {
    const Instance inst = oracle::randomInstance(rng, 8, 8, 0.2, 3, 2, 10.0, 1.0, 5.0);
    const Prepared p = prepare(inst);
    const auto list = enumerateFeasibleSequences(p.scene, p.gtw);
    const std::set<WindowSequence> got(list.begin(), list.end());
    EXPECT_EQ(got.size(), list.size());
    EXPECT_EQ(got, bruteForceSequences(p.scene)) << k;
    if (!got.empty()) ++nonempty;
  }
  EXPECT_GT(nonempty, 0);
}

TEST(UsableIntervals, CoLocatedTargetIsFullyUsable) {
  const Prepared p = prepare(makeInstance({}, {2, 2}, 1.0, {stationaryTarget(1, {2, 2}, 0, 5)}));
  const auto ivs = sequenceUsableIntervals(p.scene, {0, 1, 0});
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_DOUBLE_EQ(ivs[0].lo, 0.0);
  EXPECT_DOUBLE_EQ(ivs[0].hi, 5.0);
  const UsableReport rep = usableFraction(p.scene, p.gtw);
  EXPECT_DOUBLE_EQ(rep.targets[0].fraction, 1.0);
  EXPECT_DOUBLE_EQ(rep.min_fraction, 1.0);
}

TEST(UsableIntervals, SliverHasZeroFraction) {
  const Prepared p = prepare(makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {5, 0}, 0, 5)}));
  const UsableReport rep = usableFraction(p.scene, p.gtw);
  ASSERT_EQ(rep.targets[0].usable.size(), 1u);
  EXPECT_NEAR(rep.targets[0].usable[0].lo, 5.0, 1e-12);
  EXPECT_NEAR(rep.targets[0].fraction, 0.0, 1e-12);
}

TEST(UsableIntervals, InfeasibleSequenceThrows) {
  const Prepared p = prepare(makeInstance(
      {}, {0, 0}, 1.0, {stationaryTarget(1, {2, 0}, 0, 3), stationaryTarget(2, {20, 0}, 0, 3)}));
  EXPECT_THROW(sequenceUsableIntervals(p.scene, {0, 1, 2, 0}), AnalysisError);
  EXPECT_THROW(usableFraction(p.scene, p.gtw), AnalysisError);
}

TEST(UsableIntervals, LineInstanceMatchesDenseScan) {
  // Free plane: target 1 parked at (2,0) during [1,6]; target 2 drifts from
  // (5,0) at 0.1 m/s during [4,9].
  Target second;
  second.id = 2;
  second.windows = {{4, 9, {5.4, 0}, {0.1, 0}}};
  const Instance inst = makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {2, 0}, 1, 6), second});
  const Prepared p = prepare(inst);
  const auto ivs = sequenceUsableIntervals(p.scene, {0, 1, 2, 0});
  // Dense scan with straight-line travel at 1e-3 s.
  const double step = 1e-3;
  const TargetWindow& w1 = inst.targets[0].windows[0];
  const TargetWindow& w2 = inst.targets[1].windows[0];
  std::vector<double> t2s;
  for (double t = w2.t0; t <= w2.tf + 1e-12; t += step) t2s.push_back(t);
  double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
  for (double t1 = w1.t0; t1 <= w1.tf + 1e-12; t1 += step) {
    if (distance({0, 0}, w1.at(t1)) > t1) continue;
    for (double t2 : t2s) {
      if (t2 < t1 || distance(w1.at(t1), w2.at(t2)) > t2 - t1) continue;
      lo1 = std::min(lo1, t1);
      hi1 = std::max(hi1, t1);
      lo2 = std::min(lo2, t2);
      hi2 = std::max(hi2, t2);
    }
  }
  EXPECT_NEAR(ivs[0].lo, lo1, 2 * step);
  EXPECT_NEAR(ivs[0].hi, hi1, 2 * step);
  EXPECT_NEAR(ivs[1].lo, lo2, 2 * step);
  EXPECT_NEAR(ivs[1].hi, hi2, 2 * step);
}

TEST(UsableIntervals, EarliestNeverAfterLatest) {
  std::mt19937_64 rng(137);
  for (int k = 0; k < 8; ++k) {
    const Prepared p = prepare(oracle::randomInstance(rng, 8, 8, 0.2, 3, 2, 10.0, 2.0, 6.0));
    for (const WindowSequence& seq : enumerateFeasibleSequences(p.scene, p.gtw)) {
      for (const Interval& iv : sequenceUsableIntervals(p.scene, seq)) {
        EXPECT_LE(iv.lo, iv.hi + 1e-9);
      }
    }
  }
}

TEST(UsableFraction, MatchesForcedInterceptionOracle) {
  const double step = 0.25;
  for (std::uint64_t seed : {21u, 22u}) {
    GeneratorParams gp;
    gp.n_targets = 4;
    gp.windows_per_target = 2;
    gp.sum_window_len = 6.0;
    gp.grid.rows = gp.grid.cols = 8;
    gp.seed = seed;
    const Instance inst = generateInstance(gp).instance;
    const Prepared p = prepare(inst);
    const UsableReport rep = usableFraction(p.scene, p.gtw);
    for (const Target& target : inst.targets) {
      const IntervalSet& usable = rep.targets[target.id - 1].usable;
      double sampled = 0.0, total = 0.0;
      for (const TargetWindow& w : target.windows) {
        for (double t = w.t0 + step / 2; t < w.tf; t += step) {
          const bool forced = oracle::interceptableAt(inst, target.id, t);
          total += step;
          if (forced) sampled += step;
          // Membership must agree away from the interval ends.
          bool near_end = false;
          for (const Interval& iv : usable) {
            near_end |= std::abs(t - iv.lo) < 2 * step || std::abs(t - iv.hi) < 2 * step;
          }
          if (!near_end) EXPECT_EQ(usable.contains(t), forced) << "target " << target.id << " t " << t;
        }
      }
      const double ends = 2.0 * static_cast<double>(usable.size() + target.windows.size());
      EXPECT_NEAR(rep.targets[target.id - 1].fraction, sampled / total, 2 * step * ends / total);
    }
  }
}

TEST(UsableFraction, SolverInterceptionsAreUsable) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GeneratorParams gp;
    gp.n_targets = 4;
    gp.windows_per_target = 2;
    gp.sum_window_len = 6.0;
    gp.seed = seed;
    const GeneratedInstance gen = generateInstance(gp);
    const Prepared p = prepare(gen.instance);
    const UsableReport rep = usableFraction(p.scene, p.gtw);
    const SearchResult r = dfsSolve(p.scene, p.gtw);
    ASSERT_EQ(r.status, SolveStatus::Feasible);
    for (const Solution* sol : {&r.solution, &gen.witness}) {
      for (const Interception& ic : sol->interceptions) {
        EXPECT_TRUE(rep.targets[ic.target - 1].usable.contains(ic.time, 1e-6))
            << "seed " << seed << " target " << ic.target << " at " << ic.time;
      }
    }
  }
}

TEST(UsableFraction, EnlargingWindowsGrowsUsableSets) {
  // Open plane and one window per target, so each window can be stretched
  // along its own motion by a second at both ends.
  for (std::uint64_t seed = 31; seed <= 36; ++seed) {
    GeneratorParams gp;
    gp.n_targets = 3;
    gp.windows_per_target = 1;
    gp.sum_window_len = 3.0;
    gp.grid.occupancy_fraction = 0.0;
    gp.seed = seed;
    const Instance small = generateInstance(gp).instance;
    Instance big = small;
    for (Target& t : big.targets) {
      TargetWindow& w = t.windows.front();
      const double t0 = std::max(0.0, w.t0 - 1.0);
      w.p0 = w.at(t0);
      w.t0 = t0;
      w.tf += 1.0;
    }
    const Prepared a = prepare(small);
    const Prepared b = prepare(big);
    const UsableReport ra = usableFraction(a.scene, a.gtw);
    const UsableReport rb = usableFraction(b.scene, b.gtw);
    for (int i = 0; i < 3; ++i) {
      for (const Interval& iv : ra.targets[i].usable) {
        EXPECT_TRUE(rb.targets[i].usable.contains(iv.lo, 1e-9) &&
                    rb.targets[i].usable.contains(iv.hi, 1e-9));
      }
      EXPECT_GE(rb.targets[i].usable.totalLength(), ra.targets[i].usable.totalLength() - 1e-9)
          << "seed " << seed;
    }
  }
}

TEST(UsableFraction, EnlargingCanLowerTheRatio) {
  // Usable time grows from [5,10] to [5,11] but the window grows faster.
  const Prepared a = prepare(makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {5, 0}, 5, 10)}));
  const Prepared b = prepare(makeInstance({}, {0, 0}, 1.0, {stationaryTarget(1, {5, 0}, 4, 11)}));
  EXPECT_NEAR(usableFraction(a.scene, a.gtw).min_fraction, 1.0, 1e-12);
  EXPECT_NEAR(usableFraction(b.scene, b.gtw).min_fraction, 6.0 / 7.0, 1e-12);
}

TEST(UsableFraction, CsvOutputs) {
  const Prepared p = prepare(makeInstance({}, {2, 2}, 1.0, {stationaryTarget(1, {2, 2}, 0, 5)}));
  const UsableReport rep = usableFraction(p.scene, p.gtw);
  std::ostringstream a, b, c;
  writeUsableIntervalsCsv(rep, a);
  writeUsableFractionsCsv(rep, b);
  writeMinFractionCsv(rep, c);
  EXPECT_EQ(a.str(), "target,interval_lo,interval_hi\n1,0,5\n");
  EXPECT_EQ(b.str(), "target,fraction\n1,1\n");
  EXPECT_EQ(c.str(), "min_fraction\n1\n");
}
