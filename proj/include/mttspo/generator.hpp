#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mttspo/model.hpp"
#include "mttspo/visgraph.hpp"

namespace mttspo {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridParams {
  int rows = 15;
  int cols = 15;
  double cell_size = 1.0;
  double occupancy_fraction = 0.2;
};

struct GeneratorParams {
  int n_targets = 4;
  int windows_per_target = 2;
  double sum_window_len = 10.0;  // per target, seconds
  GridParams grid;
  double v_max = 1.0;
  double beta = 0.99;
  std::uint64_t seed = 1;
};

/// An instance together with the trajectory it was built around.
struct GeneratedInstance {
  Instance instance;
  Solution witness;
};

inline constexpr int kSamplingRetries = 1000;
inline constexpr int kVelocityRetries = 20;
inline constexpr int kTargetRetries = 50;

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline GenerationError generationFailure(const std::string& what, std::uint64_t seed) {
  return GenerationError(what + " (seed " + std::to_string(seed) + ")");
}

inline GridSpec sampleGrid(Rng& rng, const GridParams& p) {
  if (p.rows <= 0 || p.cols <= 0 || !(p.cell_size > 0.0) || p.occupancy_fraction < 0.0 ||
      p.occupancy_fraction >= 1.0) {
    throw InputError("grid needs positive size and occupancy fraction in [0,1)");
  }
  GridSpec g;
  g.rows = p.rows;
  g.cols = p.cols;
  g.cell_size = p.cell_size;
  std::vector<Cell> cells;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) cells.push_back({r, c});
  }
  std::shuffle(cells.begin(), cells.end(), rng);
  const auto count = static_cast<std::size_t>(std::lround(p.occupancy_fraction * cells.size()));
  g.occupied.assign(cells.begin(), cells.begin() + count);
  std::sort(g.occupied.begin(), g.occupied.end());
  return g;
}

inline Point sampleFreePoint(Rng& rng, const GridSpec& g, const ObstacleSet& obs,
                             std::uint64_t seed) {
  for (int k = 0; k < kSamplingRetries; ++k) {
    const Point p{uniform(rng, 0.0, g.width()), uniform(rng, 0.0, g.height())};
    if (!pointInInterior(p, obs)) return p;
  }
  throw generationFailure("no free point found", seed);
}

/// Splits `total` into k positive parts at uniformly sampled cut points.
inline std::vector<double> randomPartition(Rng& rng, double total, int k) {
  std::vector<double> cuts{0.0, total};
  for (int i = 1; i < k; ++i) cuts.push_back(uniform(rng, 0.0, total));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> parts;
  for (int i = 0; i < k; ++i) parts.push_back(cuts[i + 1] - cuts[i]);
  for (double& x : parts) {
    if (!(x > 0.0)) x = total * 1e-6;  // degenerate cut; keep windows non-empty
  }
  double sum = 0.0;
  for (double x : parts) sum += x;
  for (double& x : parts) x *= total / sum;
  return parts;
}

inline bool windowIsFree(const TargetWindow& w, const ObstacleSet& obs) {
  const Point a = w.p0, b = w.endPosition();
  return !pointInInterior(a, obs) && !pointInInterior(b, obs) && segmentIsFree(a, b, obs);
}

inline Vec2 sampleVelocity(Rng& rng, double v_max) {
  const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double speed = uniform(rng, v_max / 8.0, v_max / 4.0);
  return {speed * std::cos(ang), speed * std::sin(ang)};
}

/// Piecewise-linear target motion with k segments whose windows sum to
/// `total_len`, passing through `p` at time `t` inside one of the windows.
/// Each segment lasts 1.5 times its window; windows never start before 0.
/// Returns the windows and the index of the one containing t, or nothing if
/// some window could not be kept out of the obstacles.
inline std::optional<std::pair<std::vector<TargetWindow>, int>> trySampleTargetWindows(
    Rng& rng, Point p, double t, int k, double total_len, double v_max,
    const ObstacleSet& obs) {
  const std::vector<double> len = randomPartition(rng, total_len, k);
  std::vector<double> span(k);
  for (int m = 0; m < k; ++m) span[m] = 1.5 * len[m];

  std::vector<int> candidates;
  double prefix = 0.0;
  std::vector<double> prefix_at(k);
  for (int m = 0; m < k; ++m) {
    prefix_at[m] = prefix;
    if (prefix <= t) candidates.push_back(m);
    prefix += span[m];
  }
  const int j = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];

  // Window j is [seg_j + off_j, seg_j + off_j + len_j] and contains t.
  const double room = t - prefix_at[j];
  const double off_j = uniform(rng, 0.0, std::min(0.5 * len[j], room));
  const double into = uniform(rng, 0.0, std::min(len[j], room - off_j));
  std::vector<double> seg_start(k);
  seg_start[j] = t - into - off_j;
  for (int m = j + 1; m < k; ++m) seg_start[m] = seg_start[m - 1] + span[m - 1];
  for (int m = j - 1; m >= 0; --m) seg_start[m] = seg_start[m + 1] - span[m];

  std::vector<double> off(k);
  for (int m = 0; m < k; ++m) off[m] = m == j ? off_j : uniform(rng, 0.0, 0.5 * len[m]);

  std::vector<TargetWindow> windows(k);
  std::vector<Vec2> vel(k);
  auto sampleSegment = [&](int m, auto positionOf) {
    for (int attempt = 0; attempt < kVelocityRetries; ++attempt) {
      TargetWindow w;
      w.t0 = seg_start[m] + off[m];
      w.tf = w.t0 + len[m];
      w.vel = sampleVelocity(rng, v_max);
      w.p0 = positionOf(w.vel, w.t0);
      if (windowIsFree(w, obs)) {
        windows[m] = w;
        vel[m] = w.vel;
        return true;
      }
    }
    return false;
  };

  if (!sampleSegment(j, [&](Vec2 v, double t0) { return p + (t0 - t) * v; })) return {};
  // Segment boundaries carry the position from one segment to the next.
  Point boundary_after = windows[j].p0 + (seg_start[j] + span[j] - windows[j].t0) * vel[j];
  for (int m = j + 1; m < k; ++m) {
    const Point start = boundary_after;
    if (!sampleSegment(m, [&](Vec2 v, double t0) { return start + (t0 - seg_start[m]) * v; })) {
      return {};
    }
    boundary_after = start + span[m] * vel[m];
  }
  Point boundary_before = windows[j].p0 + (seg_start[j] - windows[j].t0) * vel[j];
  for (int m = j - 1; m >= 0; --m) {
    const Point end = boundary_before;
    const double seg_end = seg_start[m] + span[m];
    if (!sampleSegment(m, [&](Vec2 v, double t0) { return end + (t0 - seg_end) * v; })) {
      return {};
    }
    boundary_before = end - span[m] * vel[m];
  }
  return std::pair{windows, j};
}

inline std::optional<std::pair<std::vector<TargetWindow>, int>> sampleTargetWindows(
    Rng& rng, Point p, double t, int k, double total_len, double v_max, const ObstacleSet& obs,
    int attempts) {
  for (int a = 0; a < attempts; ++a) {
    if (auto got = trySampleTargetWindows(rng, p, t, k, total_len, v_max, obs)) return got;
  }
  return {};
}

/// Appends a full-speed traversal of `path` starting at the trajectory end.
inline void appendPath(Trajectory& traj, const std::vector<Point>& path, double speed) {
  double t = traj.endTime();
  for (std::size_t i = 1; i < path.size(); ++i) {
    t += distance(path[i - 1], path[i]) / speed;
    traj.push(t, path[i]);
  }
}

inline std::vector<int> witnessWindowIndex(const Instance& inst, const Solution& witness) {
  std::vector<int> out(inst.targetCount(), -1);
  for (const Interception& ic : witness.interceptions) out[ic.target - 1] = ic.window_index;
  return out;
}

inline std::vector<double> witnessTimes(const Instance& inst, const Solution& witness) {
  std::vector<double> out(inst.targetCount(), 0.0);
  for (const Interception& ic : witness.interceptions) out[ic.target - 1] = ic.time;
  return out;
}

}  // namespace detail

/// Random instance that is feasible by construction: the agent visits
/// random free points in order at beta*v_max along shortest paths, and each
/// target is made to pass through its point at the visit time.
inline GeneratedInstance generateInstance(const GeneratorParams& params) {
  if (params.n_targets < 0 || params.windows_per_target < 1 || !(params.sum_window_len > 0.0) ||
      !(params.v_max > 0.0) || !(params.beta > 0.0) || params.beta > 1.0) {
    throw InputError("generator parameters must be positive (beta in (0,1])");
  }
  detail::Rng rng(params.seed);
  GeneratedInstance out;
  Instance& inst = out.instance;
  inst.grid = detail::sampleGrid(rng, params.grid);
  inst.obstacles = loadOccupancyGrid(inst.grid);
  inst.v_max = params.v_max;
  inst.depot = detail::sampleFreePoint(rng, inst.grid, inst.obstacles, params.seed);

  const VisibilityGraph graph = buildVisibilityGraph(inst);
  const PathOracle paths(graph, inst.obstacles);
  const double speed = params.beta * params.v_max;

  Trajectory& traj = out.witness.trajectory;
  traj.push(0.0, inst.depot);
  Point prev = inst.depot;
  for (int i = 1; i <= params.n_targets; ++i) {
    // Interception point, agent path to it, and a target motion through it;
    // all re-sampled together until the target's windows avoid obstacles.
    std::vector<Point> path;
    Point p;
    std::optional<std::pair<std::vector<TargetWindow>, int>> windows;
    for (int attempt = 0; attempt < kSamplingRetries && !windows; ++attempt) {
      p = detail::sampleFreePoint(rng, inst.grid, inst.obstacles, params.seed);
      path = paths.path(prev, p);
      if (path.empty()) continue;
      double t = traj.endTime();
      for (std::size_t k = 1; k < path.size(); ++k) t += distance(path[k - 1], path[k]) / speed;
      windows = detail::sampleTargetWindows(rng, p, t, params.windows_per_target,
                                            params.sum_window_len, params.v_max, inst.obstacles,
                                            kTargetRetries);
    }
    if (!windows) {
      throw detail::generationFailure("no usable interception point for target " +
                                          std::to_string(i),
                                      params.seed);
    }
    detail::appendPath(traj, path, speed);
    Target target;
    target.id = i;
    target.windows = std::move(windows->first);
    inst.targets.push_back(std::move(target));
    out.witness.interceptions.push_back({i, windows->second, traj.endTime()});
    prev = p;
  }
  detail::appendPath(traj, paths.path(prev, inst.depot), speed);
  out.witness.final_time = traj.endTime();
  validateInstance(inst);
  return out;
}

/// Shrinks every window in proportion so each target's total becomes
/// `new_sum`; each shorter window is placed uniformly inside the old one
/// while still containing the witness interception time.
inline GeneratedInstance shortenWindows(const GeneratedInstance& gen, double new_sum,
                                        std::uint64_t seed) {
  if (!(new_sum > 0.0)) {
    throw GenerationError("window sum must stay positive to contain the witness instants");
  }
  detail::Rng rng(seed);
  GeneratedInstance out = gen;
  const std::vector<int> used = detail::witnessWindowIndex(gen.instance, gen.witness);
  const std::vector<double> when = detail::witnessTimes(gen.instance, gen.witness);
  for (Target& target : out.instance.targets) {
    double sum = 0.0;
    for (const TargetWindow& w : target.windows) sum += w.length();
    if (new_sum > sum + 1e-9) {
      throw GenerationError("cannot shorten target " + std::to_string(target.id) + " from " +
                            std::to_string(sum) + " s to " + std::to_string(new_sum) + " s");
    }
    if (std::abs(new_sum - sum) <= 1e-12) continue;
    const double ratio = new_sum / sum;
    for (std::size_t j = 0; j < target.windows.size(); ++j) {
      TargetWindow& w = target.windows[j];
      const double len = w.length() * ratio;
      double lo = w.t0, hi = w.tf - len;
      if (static_cast<int>(j) == used[target.id - 1]) {
        const double t = when[target.id - 1];
        lo = std::max(lo, t - len);
        hi = std::min(hi, t);
      }
      const double start = hi > lo ? detail::uniform(rng, lo, hi) : lo;
      w.p0 = w.at(start);
      w.t0 = start;
      w.tf = start + len;
    }
  }
  return out;
}

/// Replaces each single-window target by k windows of the same total length,
/// re-sampling the target's motion so it still passes through the witness
/// interception point.
inline GeneratedInstance splitWindows(const GeneratedInstance& gen, int k, std::uint64_t seed) {
  if (k < 1) throw InputError("split needs at least one window per target");
  for (const Target& target : gen.instance.targets) {
    if (target.windows.size() != 1) {
      throw InputError("split expects one window per target");
    }
  }
  if (k == 1) return gen;
  detail::Rng rng(seed);
  GeneratedInstance out = gen;
  const std::vector<double> when = detail::witnessTimes(gen.instance, gen.witness);
  for (Target& target : out.instance.targets) {
    const TargetWindow& w = target.windows.front();
    const double t = when[target.id - 1];
    const Point p = w.at(t);
    auto windows = detail::sampleTargetWindows(rng, p, t, k, w.length(), out.instance.v_max,
                                               out.instance.obstacles, kSamplingRetries);
    if (!windows) {
      throw detail::generationFailure(
          "cannot split target " + std::to_string(target.id) + " clear of obstacles", seed);
    }
    target.windows = std::move(windows->first);
    for (Interception& ic : out.witness.interceptions) {
      if (ic.target == target.id) ic.window_index = windows->second;
    }
  }
  validateInstance(out.instance);
  return out;
}

}  // namespace mttspo
