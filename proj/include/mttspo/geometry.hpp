// Planar geometry for rectilinear obstacle worlds: points, exact-sign
// orientation, occupancy-grid polygonization, and visibility predicates
// (static segments and a linearly moving endpoint).

#ifndef MTTSPO_GEOMETRY_HPP
#define MTTSPO_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mttspo/interval.hpp"

namespace mttspo {

/// Tolerance (meters) used wherever an exact sign is not available.
inline constexpr double kGeoEps = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Point a, Point b) { return !(a == b); }
  friend bool operator<(Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

/// Velocities share the representation of points (m/s).
using Vec2 = Point;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

inline double pointSegmentDistance(Point p, Point a, Point b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

namespace detail {

// Error-free transformations (Knuth two-sum, fma two-product).
inline void twoSum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

inline void twoDiff(double a, double b, double& d, double& e) {
  twoSum(a, -b, d, e);
}

// Sign of an exactly represented sum of doubles, via expansion growth.
inline int expansionSign(std::vector<double> terms) {
  std::vector<double> expansion;
  for (double term : terms) {
    double q = term;
    std::vector<double> next;
    for (double component : expansion) {
      double s, e;
      twoSum(q, component, s, e);
      if (e != 0.0) next.push_back(e);
      q = s;
    }
    if (q != 0.0) next.push_back(q);
    expansion = std::move(next);
  }
  if (expansion.empty()) return 0;
  return expansion.back() > 0.0 ? 1 : -1;
}

inline int orient2dExact(Point a, Point b, Point c) {
  double acx, acy, bcx, bcy, e1, e2, e3, e4;
  twoDiff(a.x, c.x, acx, e1);
  twoDiff(a.y, c.y, acy, e2);
  twoDiff(b.x, c.x, bcx, e3);
  twoDiff(b.y, c.y, bcy, e4);
  if (e1 == 0.0 && e2 == 0.0 && e3 == 0.0 && e4 == 0.0) {
    const double lh = acx * bcy;
    const double ll = std::fma(acx, bcy, -lh);
    const double rh = acy * bcx;
    const double rl = std::fma(acy, bcx, -rh);
    return expansionSign({ll, -rl, lh, -rh});
  }
  using boost::multiprecision::cpp_rational;
  const cpp_rational det =
      (cpp_rational(a.x) - cpp_rational(c.x)) *
          (cpp_rational(b.y) - cpp_rational(c.y)) -
      (cpp_rational(a.y) - cpp_rational(c.y)) *
          (cpp_rational(b.x) - cpp_rational(c.x));
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace detail

/// Sign of the signed area of triangle (a, b, c): +1 for a left turn.
/// Exact for all finite double inputs.
inline int orient2d(Point a, Point b, Point c) {
  const double l = (a.x - c.x) * (b.y - c.y);
  const double r = (a.y - c.y) * (b.x - c.x);
  const double det = l - r;
  const double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient2dExact(a, b, c);
}

/// Closed boundary loop; interior lies to the left of every directed edge.
using Ring = std::vector<Point>;

/// One obstacle: an outer ring (counterclockwise) plus hole rings
/// (clockwise). Rings may touch at isolated vertices.
struct Polygon {
  std::vector<Ring> rings;
  Point lo{kInf, kInf};
  Point hi{-kInf, -kInf};

  void updateBounds() {
    lo = {kInf, kInf};
    hi = {-kInf, -kInf};
    for (const Ring& ring : rings) {
      for (Point p : ring) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
      }
    }
  }

  double area() const {
    double total = 0.0;
    for (const Ring& ring : rings) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        total += cross(ring[i], ring[(i + 1) % ring.size()]);
      }
    }
    return 0.5 * total;
  }

  template <class Fn>
  void forEachEdge(Fn&& fn) const {
    for (const Ring& ring : rings) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        fn(ring[i], ring[(i + 1) % ring.size()]);
      }
    }
  }
};

struct ObstacleSet {
  std::vector<Polygon> polygons;
  std::vector<Point> convex_vertices;

  bool empty() const { return polygons.empty(); }
};

// ---------------------------------------------------------------------------
// Point predicates

namespace detail {

inline bool onSegment(Point p, Point a, Point b) {
  if (orient2d(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Winding number of the polygon's boundary chain around p (p off boundary).
inline int winding(Point p, const Polygon& poly) {
  int wn = 0;
  poly.forEachEdge([&](Point a, Point b) {
    if (a.y <= p.y) {
      if (b.y > p.y && orient2d(a, b, p) > 0) ++wn;
    } else {
      if (b.y <= p.y && orient2d(a, b, p) < 0) --wn;
    }
  });
  return wn;
}

inline bool inBounds(Point p, const Polygon& poly, double pad) {
  return p.x >= poly.lo.x - pad && p.x <= poly.hi.x + pad &&
         p.y >= poly.lo.y - pad && p.y <= poly.hi.y + pad;
}

inline bool strictlyInside(Point p, const Polygon& poly) {
  if (!inBounds(p, poly, 0.0)) return false;
  bool boundary = false;
  poly.forEachEdge([&](Point a, Point b) {
    if (!boundary && onSegment(p, a, b)) boundary = true;
  });
  if (boundary) return false;
  return winding(p, poly) != 0;
}

inline double boundaryDistance(Point p, const Polygon& poly) {
  double best = kInf;
  poly.forEachEdge([&](Point a, Point b) {
    best = std::min(best, pointSegmentDistance(p, a, b));
  });
  return best;
}

// Inside with clearance above kGeoEps; used on the midpoints of segment
// pieces, whose coordinates carry rounding from intersection parameters.
inline bool deepInside(Point p, const Polygon& poly) {
  if (!inBounds(p, poly, 0.0)) return false;
  if (boundaryDistance(p, poly) <= kGeoEps) return false;
  return winding(p, poly) != 0;
}

}  // namespace detail

/// True iff p lies strictly inside some obstacle; boundaries are free.
inline bool pointInInterior(Point p, const ObstacleSet& obs) {
  for (const Polygon& poly : obs.polygons) {
    if (detail::strictlyInside(p, poly)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Segment predicate

namespace detail {

// Appends the parameters along a->b where it meets edge c->d.
inline void edgeCrossParams(Point a, Point b, Point c, Point d,
                            std::vector<double>& params) {
  const int o1 = orient2d(a, b, c);
  const int o2 = orient2d(a, b, d);
  const Vec2 ab = b - a;
  if (o1 == 0 && o2 == 0) {
    const double len2 = dot(ab, ab);
    const double tc = dot(c - a, ab) / len2;
    const double td = dot(d - a, ab) / len2;
    if (std::max(tc, td) < 0.0 || std::min(tc, td) > 1.0) return;
    params.push_back(std::clamp(tc, 0.0, 1.0));
    params.push_back(std::clamp(td, 0.0, 1.0));
    return;
  }
  if (o1 * o2 > 0) return;
  const int o3 = orient2d(c, d, a);
  const int o4 = orient2d(c, d, b);
  if (o3 * o4 > 0) return;
  const Vec2 cd = d - c;
  const double denom = cross(ab, cd);
  if (denom == 0.0) return;
  params.push_back(std::clamp(cross(c - a, cd) / denom, 0.0, 1.0));
}

inline bool segmentBoxOverlap(Point a, Point b, const Polygon& poly) {
  return std::max(a.x, b.x) >= poly.lo.x - kGeoEps &&
         std::min(a.x, b.x) <= poly.hi.x + kGeoEps &&
         std::max(a.y, b.y) >= poly.lo.y - kGeoEps &&
         std::min(a.y, b.y) <= poly.hi.y + kGeoEps;
}

inline bool segmentHitsInterior(Point a, Point b, const Polygon& poly) {
  if (!segmentBoxOverlap(a, b, poly)) return false;
  std::vector<double> params{0.0, 1.0};
  poly.forEachEdge(
      [&](Point c, Point d) { edgeCrossParams(a, b, c, d, params); });
  std::sort(params.begin(), params.end());
  const Vec2 ab = b - a;
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    if (params[i + 1] - params[i] <= 1e-12) continue;
    const Point mid = a + (0.5 * (params[i] + params[i + 1])) * ab;
    if (deepInside(mid, poly)) return true;
  }
  return false;
}

}  // namespace detail

/// True iff the open segment (a, b) avoids every obstacle interior.
/// Contact with edges or vertices, including sliding along an edge, is free.
inline bool segmentIsFree(Point a, Point b, const ObstacleSet& obs) {
  if (a == b) return !pointInInterior(a, obs);
  for (const Polygon& poly : obs.polygons) {
    if (detail::segmentHitsInterior(a, b, poly)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Moving endpoint visibility

/// Constant-velocity motion on [t0, tf].
struct LinearMotion {
  Point p0;
  Vec2 vel;
  double t0 = 0.0;
  double tf = 0.0;

  Point at(double t) const {
    if (vel.x == 0.0 && vel.y == 0.0) return p0;
    return p0 + (t - t0) * vel;
  }
};

/// Maximal closed subintervals of [m.t0, m.tf] during which the segment from
/// q to the moving point is free. Visibility only changes at instants where
/// the sight line sweeps an obstacle vertex or the moving point crosses an
/// edge line; each such instant and each open gap between them is classified
/// with segmentIsFree.
inline IntervalSet visibleSubIntervals(Point q, const LinearMotion& m,
                                       const ObstacleSet& obs) {
  IntervalSet out;
  if (m.tf < m.t0) return out;
  const Point a = m.at(m.t0);
  const Point b = m.at(m.tf);
  if (m.tf == m.t0 || a == b) {
    if (segmentIsFree(q, a, obs)) out.add({m.t0, m.tf});
    return out;
  }

  std::vector<double> critical{m.t0, m.tf};
  const double span = m.tf - m.t0;
  auto addTime = [&](double t) {
    if (t > m.t0 && t < m.tf) critical.push_back(t);
  };
  const Point tri_lo{std::min({q.x, a.x, b.x}), std::min({q.y, a.y, b.y})};
  const Point tri_hi{std::max({q.x, a.x, b.x}), std::max({q.y, a.y, b.y})};
  for (const Polygon& poly : obs.polygons) {
    if (poly.hi.x < tri_lo.x - kGeoEps || poly.lo.x > tri_hi.x + kGeoEps ||
        poly.hi.y < tri_lo.y - kGeoEps || poly.lo.y > tri_hi.y + kGeoEps) {
      continue;
    }
    poly.forEachEdge([&](Point c, Point d) {
      // Sight line through vertex c: cross(c - q, P(t) - q) = 0.
      const Vec2 qc = c - q;
      const double slope = cross(qc, m.vel);
      if (slope != 0.0) addTime(m.t0 - cross(qc, m.p0 - q) / slope);
      // Moving point on the supporting line of edge c->d.
      const Vec2 cd = d - c;
      const double rate = cross(cd, m.vel);
      if (rate != 0.0) addTime(m.t0 - cross(cd, m.p0 - c) / rate);
    });
  }
  std::sort(critical.begin(), critical.end());
  std::vector<double> times;
  for (double t : critical) {
    if (times.empty() || t - times.back() > 1e-12 * std::max(1.0, span)) {
      times.push_back(t);
    }
  }
  if (times.back() != m.tf) times.back() = m.tf;

  std::vector<char> at_time(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    at_time[i] = segmentIsFree(q, m.at(times[i]), obs);
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (at_time[i]) out.add({times[i], times[i]});
    if (i + 1 < times.size()) {
      const double mid = 0.5 * (times[i] + times[i + 1]);
      if (segmentIsFree(q, m.at(mid), obs)) out.add({times[i], times[i + 1]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Occupancy grids

/// Cell (row, col); row 0 is the bottom row, col 0 the leftmost column.
struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator<(Cell a, Cell b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  }
  friend bool operator==(Cell a, Cell b) {
    return a.row == b.row && a.col == b.col;
  }
};

struct GridSpec {
  int rows = 0;
  int cols = 0;
  double cell_size = 1.0;
  std::vector<Cell> occupied;  // sorted, unique

  double width() const { return cols * cell_size; }
  double height() const { return rows * cell_size; }
};

namespace detail {

inline std::vector<Point> simplifyRing(const std::vector<Point>& loop) {
  std::vector<Point> out;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point prev = loop[(i + n - 1) % n];
    const Point next = loop[(i + 1) % n];
    if (orient2d(prev, loop[i], next) != 0) out.push_back(loop[i]);
  }
  return out;
}

}  // namespace detail

/// Convex vertices (interior angle below pi) of every ring, deduplicated.
inline std::vector<Point> convexVertices(const std::vector<Polygon>& polys) {
  std::vector<Point> out;
  for (const Polygon& poly : polys) {
    for (const Ring& ring : poly.rings) {
      const std::size_t n = ring.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (orient2d(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]) > 0) {
          out.push_back(ring[i]);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Merges the occupied cells of each 4-connected component into one
/// rectilinear polygon (with holes). Cells touching only diagonally stay in
/// separate polygons.
inline ObstacleSet loadOccupancyGrid(const GridSpec& grid) {
  if (grid.rows < 0 || grid.cols < 0 || !(grid.cell_size > 0.0)) {
    throw InputError("grid dimensions must be non-negative with positive cell size");
  }
  const int rows = grid.rows;
  const int cols = grid.cols;
  std::vector<int> label(static_cast<std::size_t>(rows) * cols, -1);
  auto idx = [cols](int r, int c) { return static_cast<std::size_t>(r) * cols + c; };
  for (const Cell& cell : grid.occupied) {
    if (cell.row < 0 || cell.row >= rows || cell.col < 0 || cell.col >= cols) {
      throw InputError("occupied cell (" + std::to_string(cell.row) + "," +
                       std::to_string(cell.col) + ") outside grid");
    }
    label[idx(cell.row, cell.col)] = -2;
  }

  // Flood-fill components in row-major order.
  int components = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (label[idx(r, c)] != -2) continue;
      std::vector<std::pair<int, int>> stack{{r, c}};
      label[idx(r, c)] = components;
      while (!stack.empty()) {
        auto [cr, cc] = stack.back();
        stack.pop_back();
        constexpr std::array<std::pair<int, int>, 4> steps{
            {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (auto [dr, dc] : steps) {
          const int nr = cr + dr, nc = cc + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          if (label[idx(nr, nc)] != -2) continue;
          label[idx(nr, nc)] = components;
          stack.push_back({nr, nc});
        }
      }
      ++components;
    }
  }

  auto occupiedBy = [&](int r, int c, int comp) {
    return r >= 0 && r < rows && c >= 0 && c < cols && label[idx(r, c)] == comp;
  };

  ObstacleSet obs;
  obs.polygons.resize(components);
  // Directed unit edges in lattice coordinates, interior on the left.
  using LatticePt = std::pair<int, int>;  // (x, y)
  for (int comp = 0; comp < components; ++comp) {
    std::multimap<LatticePt, LatticePt> edges;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (label[idx(r, c)] != comp) continue;
        if (!occupiedBy(r - 1, c, comp)) edges.insert({{c, r}, {c + 1, r}});
        if (!occupiedBy(r, c + 1, comp)) edges.insert({{c + 1, r}, {c + 1, r + 1}});
        if (!occupiedBy(r + 1, c, comp)) edges.insert({{c + 1, r + 1}, {c, r + 1}});
        if (!occupiedBy(r, c - 1, comp)) edges.insert({{c, r + 1}, {c, r}});
      }
    }
    Polygon& poly = obs.polygons[comp];
    while (!edges.empty()) {
      auto it = edges.begin();
      const LatticePt start = it->first;
      LatticePt prev = it->first;
      LatticePt cur = it->second;
      edges.erase(it);
      std::vector<LatticePt> loop{start};
      while (cur != start) {
        loop.push_back(cur);
        // At a pinch vertex prefer the sharpest left turn, which keeps the
        // walk on the boundary of the current cell.
        auto [lo, hi] = edges.equal_range(cur);
        auto chosen = lo;
        int best = -2;
        for (auto e = lo; e != hi; ++e) {
          const int dx0 = cur.first - prev.first, dy0 = cur.second - prev.second;
          const int dx1 = e->second.first - cur.first, dy1 = e->second.second - cur.second;
          const int turn = dx0 * dy1 - dy0 * dx1;  // +1 left, 0 straight, -1 right
          if (turn > best) {
            best = turn;
            chosen = e;
          }
        }
        if (lo == hi) throw std::logic_error("open boundary loop");
        prev = cur;
        cur = chosen->second;
        edges.erase(chosen);
      }
      std::vector<Point> ring;
      ring.reserve(loop.size());
      for (auto [x, y] : loop) {
        ring.push_back({x * grid.cell_size, y * grid.cell_size});
      }
      poly.rings.push_back(detail::simplifyRing(ring));
    }
    poly.updateBounds();
  }
  obs.convex_vertices = convexVertices(obs.polygons);
  return obs;
}

/// Builds an obstacle set from explicit polygons (outer rings CCW, holes CW).
inline ObstacleSet makeObstacleSet(std::vector<Polygon> polys) {
  ObstacleSet obs;
  for (Polygon& p : polys) p.updateBounds();
  obs.polygons = std::move(polys);
  obs.convex_vertices = convexVertices(obs.polygons);
  return obs;
}

inline Polygon axisBox(Point lo, Point hi) {
  Polygon p;
  p.rings.push_back({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
  p.updateBounds();
  return p;
}

}  // namespace mttspo

#endif  // MTTSPO_GEOMETRY_HPP
