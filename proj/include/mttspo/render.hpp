#pragma once

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include "mttspo/model.hpp"

namespace mttspo {

namespace detail {

// Fixed-precision coordinates keep the output byte-stable.
inline std::string svgNumber(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  std::string s = os.str();
  if (s == "-0.0000") s = "0.0000";
  return s;
}

inline std::string svgPoint(Point p) { return svgNumber(p.x) + "," + svgNumber(-p.y); }

inline const char* targetColour(int id) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[(id - 1) % 10];
}

}  // namespace detail

/// Static picture of an instance: obstacles, each target window as a swept
/// segment (dot at its start), the depot, and optionally the agent path with
/// interception markers. World y points up; the SVG is flipped to match.
inline std::string renderSvg(const Instance& inst, const std::optional<Solution>& sol = std::nullopt) {
  using detail::svgNumber;
  using detail::svgPoint;
  Point lo{0.0, 0.0}, hi{inst.grid.width(), inst.grid.height()};
  auto grow = [&](Point p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  };
  grow(inst.depot);
  for (const Polygon& poly : inst.obstacles.polygons) {
    grow(poly.lo);
    grow(poly.hi);
  }
  for (const Target& t : inst.targets) {
    for (const TargetWindow& w : t.windows) {
      grow(w.p0);
      grow(w.endPosition());
    }
  }
  if (sol) {
    for (const Waypoint& w : sol->trajectory.waypoints) grow(w.p);
  }
  const double margin = 0.05 * std::max({hi.x - lo.x, hi.y - lo.y, 1.0});
  lo = {lo.x - margin, lo.y - margin};
  hi = {hi.x + margin, hi.y + margin};
  const double stroke = 0.004 * std::max(hi.x - lo.x, hi.y - lo.y);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svgNumber(lo.x) << ' '
     << svgNumber(-hi.y) << ' ' << svgNumber(hi.x - lo.x) << ' ' << svgNumber(hi.y - lo.y)
     << "\" width=\"800\" height=\"" << svgNumber(800.0 * (hi.y - lo.y) / (hi.x - lo.x)) << "\">\n";
  os << "<rect x=\"" << svgNumber(lo.x) << "\" y=\"" << svgNumber(-hi.y) << "\" width=\""
     << svgNumber(hi.x - lo.x) << "\" height=\"" << svgNumber(hi.y - lo.y)
     << "\" fill=\"white\"/>\n";
  if (inst.grid.rows > 0 && inst.grid.cols > 0) {
    os << "<rect x=\"0.0000\" y=\"" << svgNumber(-inst.grid.height()) << "\" width=\""
       << svgNumber(inst.grid.width()) << "\" height=\"" << svgNumber(inst.grid.height())
       << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"" << svgNumber(stroke) << "\"/>\n";
  }

  os << "<g id=\"obstacles\" fill=\"#444444\" fill-rule=\"evenodd\">\n";
  for (const Polygon& poly : inst.obstacles.polygons) {
    os << "<path d=\"";
    for (const Ring& ring : poly.rings) {
      for (std::size_t i = 0; i < ring.size(); ++i) os << (i == 0 ? "M" : " L") << svgPoint(ring[i]);
      os << " Z ";
    }
    os << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g id=\"targets\" stroke-width=\"" << svgNumber(2 * stroke) << "\">\n";
  for (const Target& t : inst.targets) {
    const char* colour = detail::targetColour(t.id);
    for (const TargetWindow& w : t.windows) {
      os << "<line x1=\"" << svgNumber(w.p0.x) << "\" y1=\"" << svgNumber(-w.p0.y) << "\" x2=\""
         << svgNumber(w.endPosition().x) << "\" y2=\"" << svgNumber(-w.endPosition().y)
         << "\" stroke=\"" << colour << "\"/>\n";
      os << "<circle cx=\"" << svgNumber(w.p0.x) << "\" cy=\"" << svgNumber(-w.p0.y) << "\" r=\""
         << svgNumber(3 * stroke) << "\" fill=\"" << colour << "\"/>\n";
    }
  }
  os << "</g>\n";

  if (sol && !sol->trajectory.empty()) {
    os << "<g id=\"agent\">\n<polyline fill=\"none\" stroke=\"black\" stroke-width=\""
       << svgNumber(stroke) << "\" points=\"";
    for (std::size_t i = 0; i < sol->trajectory.waypoints.size(); ++i) {
      os << (i ? " " : "") << svgPoint(sol->trajectory.waypoints[i].p);
    }
    os << "\"/>\n";
    for (const Interception& ic : sol->interceptions) {
      const Point p = sol->trajectory.at(ic.time);
      os << "<circle cx=\"" << svgNumber(p.x) << "\" cy=\"" << svgNumber(-p.y) << "\" r=\""
         << svgNumber(5 * stroke) << "\" fill=\"none\" stroke=\"" << detail::targetColour(ic.target)
         << "\" stroke-width=\"" << svgNumber(stroke) << "\"/>\n";
    }
    os << "</g>\n";
  }

  const double d = 4 * stroke;
  os << "<rect id=\"depot\" x=\"" << svgNumber(inst.depot.x - d) << "\" y=\""
     << svgNumber(-inst.depot.y - d) << "\" width=\"" << svgNumber(2 * d) << "\" height=\""
     << svgNumber(2 * d) << "\" fill=\"red\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mttspo
