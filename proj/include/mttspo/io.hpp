#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mttspo/model.hpp"

namespace mttspo {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json pointJson(Point p) { return Json::array({p.x, p.y}); }

inline Point pointFrom(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(std::string(what) + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double numberField(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline int intField(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline Json toJson(const Instance& inst) {
  Json grid = {{"rows", inst.grid.rows}, {"cols", inst.grid.cols}, {"cell_size", inst.grid.cell_size}};
  Json occupied = Json::array();
  for (const Cell& c : inst.grid.occupied) occupied.push_back({c.row, c.col});
  grid["occupied"] = occupied;
  Json targets = Json::array();
  for (const Target& t : inst.targets) {
    Json windows = Json::array();
    for (const TargetWindow& w : t.windows) {
      windows.push_back({{"t0", w.t0},
                         {"tf", w.tf},
                         {"p0", detail::pointJson(w.p0)},
                         {"vel", detail::pointJson(w.vel)}});
    }
    targets.push_back({{"id", t.id}, {"windows", windows}});
  }
  return {{"v_max", inst.v_max},
          {"depot", detail::pointJson(inst.depot)},
          {"grid", grid},
          {"targets", targets}};
}

/// Parses and validates an instance; obstacles are rebuilt from the grid.
inline Instance instanceFromJson(const Json& j) {
  Instance inst;
  inst.v_max = detail::numberField(j, "v_max");
  inst.depot = detail::pointFrom(detail::field(j, "depot"), "depot");
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    inst.grid.rows = detail::intField(g, "rows");
    inst.grid.cols = detail::intField(g, "cols");
    inst.grid.cell_size = detail::numberField(g, "cell_size");
    const Json& occ = detail::field(g, "occupied");
    if (!occ.is_array()) throw InputError("grid.occupied must be a list of [row, col]");
    for (const Json& c : occ) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
        throw InputError("grid.occupied entries must be [row, col]");
      }
      inst.grid.occupied.push_back({c[0].get<int>(), c[1].get<int>()});
    }
    std::sort(inst.grid.occupied.begin(), inst.grid.occupied.end());
    inst.grid.occupied.erase(std::unique(inst.grid.occupied.begin(), inst.grid.occupied.end()),
                             inst.grid.occupied.end());
    inst.obstacles = loadOccupancyGrid(inst.grid);
  }
  const Json& targets = detail::field(j, "targets");
  if (!targets.is_array()) throw InputError("targets must be a list");
  for (const Json& t : targets) {
    Target target;
    target.id = detail::intField(t, "id");
    const Json& windows = detail::field(t, "windows");
    if (!windows.is_array()) throw InputError("windows must be a list");
    for (const Json& w : windows) {
      target.windows.push_back({detail::numberField(w, "t0"), detail::numberField(w, "tf"),
                                detail::pointFrom(detail::field(w, "p0"), "p0"),
                                detail::pointFrom(detail::field(w, "vel"), "vel")});
    }
    inst.targets.push_back(std::move(target));
  }
  validateInstance(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Solutions

inline Json toJson(const Solution& sol) {
  Json waypoints = Json::array();
  for (const Waypoint& w : sol.trajectory.waypoints) waypoints.push_back({w.t, w.p.x, w.p.y});
  Json interceptions = Json::array();
  for (const Interception& ic : sol.interceptions) {
    interceptions.push_back(
        {{"target", ic.target}, {"window_index", ic.window_index}, {"time", ic.time}});
  }
  return {{"final_time", sol.final_time},
          {"waypoints", waypoints},
          {"interceptions", interceptions}};
}

inline Solution solutionFromJson(const Json& j) {
  Solution sol;
  sol.final_time = detail::numberField(j, "final_time");
  const Json& waypoints = detail::field(j, "waypoints");
  if (!waypoints.is_array()) throw InputError("waypoints must be a list");
  for (const Json& w : waypoints) {
    if (!w.is_array() || w.size() != 3) throw InputError("waypoints entries must be [t, x, y]");
    for (const Json& v : w) {
      if (!v.is_number()) throw InputError("waypoints entries must be numbers");
    }
    sol.trajectory.push(w[0].get<double>(), {w[1].get<double>(), w[2].get<double>()});
  }
  const Json& ics = detail::field(j, "interceptions");
  if (!ics.is_array()) throw InputError("interceptions must be a list");
  for (const Json& ic : ics) {
    sol.interceptions.push_back({detail::intField(ic, "target"), detail::intField(ic, "window_index"),
                                 detail::numberField(ic, "time")});
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Files

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline void writeJsonFile(const std::string& path, const Json& j) {
  writeTextFile(path, j.dump(2) + "\n");
}

inline Instance loadInstance(const std::string& path) {
  try {
    return instanceFromJson(readJsonFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Solution loadSolution(const std::string& path) {
  try {
    return solutionFromJson(readJsonFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace mttspo
