#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mttspo/analysis.hpp"
#include "mttspo/baseline.hpp"
#include "mttspo/generator.hpp"
#include "mttspo/io.hpp"
#include "mttspo/render.hpp"
#include "mttspo/solver.hpp"

namespace mttspo::cli {

namespace fs = std::filesystem;

inline constexpr int kExitFeasible = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitTimeout = 4;

inline int exitCode(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return kExitFeasible;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::Timeout: return kExitTimeout;
  }
  return kExitError;
}

inline int exitCode(BaselineStatus s) {
  switch (s) {
    case BaselineStatus::Feasible: return kExitFeasible;
    case BaselineStatus::Infeasible: return kExitInfeasible;
    case BaselineStatus::Timeout: return kExitTimeout;
  }
  return kExitError;
}

inline std::string formatNumber(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Stats documents

inline Json solveStats(const Instance& inst, const SolveResult& r, bool lookahead, bool timings) {
  Json j = {{"solver", "mtvg"},
            {"status", toString(r.status)},
            {"final_time", nullptr},
            {"targets", inst.targetCount()},
            {"window_nodes", r.window_nodes},
            {"twg_edges", r.twg_edges},
            {"nodes_popped", r.stats.nodes_popped},
            {"astar_calls", r.stats.astar_calls},
            {"prunes", r.stats.prunes},
            {"lookahead", lookahead}};
  if (r.status == SolveStatus::Feasible) {
    j["final_time"] = r.solution.final_time;
    j["valid"] = validateSolution(inst, r.solution).ok();
  }
  if (timings) {
    j["timings"] = {{"visibility_s", r.times.visibility_s},
                    {"twg_s", r.times.twg_s},
                    {"tree_s", r.times.tree_s},
                    {"wall_s", r.wallSeconds()}};
  }
  return j;
}

inline Json baselineStats(const Instance& inst, const BaselineResult& r, bool timings) {
  Json attempts = Json::array();
  for (const BaselineAttempt& a : r.attempts) {
    Json row = {{"n_per_target", a.n_per_target}, {"status", a.status}};
    if (timings) row["wall_s"] = a.wall_s;
    attempts.push_back(row);
  }
  Json j = {{"solver", "baseline"},
            {"status", toString(r.status)},
            {"final_time", nullptr},
            {"targets", inst.targetCount()},
            {"final_n", r.finalN()},
            {"attempts", attempts}};
  if (r.status == BaselineStatus::Feasible) {
    j["final_time"] = r.solution.final_time;
    j["valid"] = validateSolution(inst, r.solution).ok();
  }
  if (timings) j["timings"] = {{"setup_s", r.setup_s}, {"wall_s", r.wallSeconds()}};
  return j;
}

inline Json reportJson(const UsableReport& rep) {
  Json targets = Json::array();
  for (const TargetUsability& t : rep.targets) {
    Json intervals = Json::array();
    for (const Interval& iv : t.usable) intervals.push_back({iv.lo, iv.hi});
    targets.push_back({{"target", t.target},
                       {"window_total", t.window_total},
                       {"fraction", t.fraction},
                       {"intervals", intervals}});
  }
  return {{"min_fraction", rep.min_fraction},
          {"sequences", rep.sequences},
          {"return_rejections", rep.return_rejections},
          {"targets", targets}};
}

// ---------------------------------------------------------------------------
// Commands

struct SolveArgs {
  std::string instance;
  std::optional<double> budget_s;
  std::string solution_out;
  std::string stats_out;
  bool no_lookahead = false;
  bool timings = false;
  bool json = false;
};

inline int cmdSolve(const SolveArgs& a, std::ostream& out) {
  const Instance inst = loadInstance(a.instance);
  SolveOptions opts;
  opts.budget_s = a.budget_s;
  opts.search.lookahead = !a.no_lookahead;
  const SolveResult r = solve(inst, opts);
  const Json stats = solveStats(inst, r, opts.search.lookahead, a.timings);
  if (!a.solution_out.empty() && r.status == SolveStatus::Feasible) {
    writeJsonFile(a.solution_out, toJson(r.solution));
  }
  if (!a.stats_out.empty()) writeJsonFile(a.stats_out, stats);
  if (a.json) {
    out << stats.dump() << '\n';
  } else {
    out << toString(r.status);
    if (r.status == SolveStatus::Feasible) out << " final_time=" << formatNumber(r.solution.final_time);
    out << " nodes_popped=" << r.stats.nodes_popped << '\n';
  }
  return exitCode(r.status);
}

struct BaselineArgs {
  std::string instance;
  int start_n = 10;
  int step = 10;
  double budget_s = 300.0;
  std::optional<int> max_n;
  std::string solution_out;
  std::string stats_out;
  std::string attempts_out;
  bool timings = false;
  bool json = false;
};

inline int cmdBaseline(const BaselineArgs& a, std::ostream& out) {
  const Instance inst = loadInstance(a.instance);
  BaselineOptions opts;
  opts.start_n = a.start_n;
  opts.step = a.step;
  opts.budget_s = a.budget_s;
  opts.max_n = a.max_n;
  const BaselineResult r = baselineSolve(inst, opts);
  const Json stats = baselineStats(inst, r, a.timings);
  if (!a.solution_out.empty() && r.status == BaselineStatus::Feasible) {
    writeJsonFile(a.solution_out, toJson(r.solution));
  }
  if (!a.stats_out.empty()) writeJsonFile(a.stats_out, stats);
  if (!a.attempts_out.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17);
    writeAttemptsCsv(r.attempts, csv, a.timings);
    writeTextFile(a.attempts_out, csv.str());
  }
  if (a.json) {
    out << stats.dump() << '\n';
  } else {
    out << toString(r.status);
    if (r.status == BaselineStatus::Feasible) out << " final_time=" << formatNumber(r.solution.final_time);
    out << " final_n=" << r.finalN() << " attempts=" << r.attempts.size() << '\n';
  }
  return exitCode(r.status);
}

inline void writeGenerated(const GeneratedInstance& gen, const fs::path& instance_path,
                           const fs::path& witness_path) {
  if (instance_path.has_parent_path()) fs::create_directories(instance_path.parent_path());
  if (witness_path.has_parent_path()) fs::create_directories(witness_path.parent_path());
  writeJsonFile(instance_path.string(), toJson(gen.instance));
  writeJsonFile(witness_path.string(), toJson(gen.witness));
}

struct GenerateArgs {
  GeneratorParams params;
  std::string out_dir = ".";
};

/// Writes <out>/instance.json and <out>/witness.json.
inline int cmdGenerate(const GenerateArgs& a, std::ostream& out) {
  const GeneratedInstance gen = generateInstance(a.params);
  const fs::path dir(a.out_dir);
  writeGenerated(gen, dir / "instance.json", dir / "witness.json");
  out << (dir / "instance.json").string() << '\n';
  return kExitFeasible;
}

struct SweepPreset {
  std::vector<int> targets;
  std::vector<double> sums;    // experiment 1
  std::vector<int> windows;    // experiment 2
  double split_base_sum = 22.0;
  int repeats = 5;
};

inline SweepPreset sweepPreset(int experiment, bool full_scale) {
  SweepPreset p;
  p.targets = full_scale ? std::vector<int>{10, 20, 30} : std::vector<int>{4, 6, 8};
  p.repeats = full_scale ? 10 : 5;
  const double max_sum = full_scale ? 50.0 : 26.0;
  if (experiment == 1) {
    for (double s = 2.0; s <= max_sum + 1e-9; s += 4.0) p.sums.push_back(s);
  } else {
    for (int k = 1; k <= 6; ++k) p.windows.push_back(k);
  }
  return p;
}

struct SweepArgs {
  int experiment = 1;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool full_scale = false;
  GridParams grid;
};

inline std::string twoDigits(long v) {
  std::ostringstream os;
  os << std::setw(2) << std::setfill('0') << v;
  return os.str();
}

/// Experiment 1 generates each instance at the largest window sum and
/// shortens it step by step; experiment 2 generates one 22 s window per
/// target and splits it. Files: <out>/<name>.json, <out>/witness/<name>.json.
inline int cmdSweep(const SweepArgs& a, std::ostream& out) {
  if (a.experiment != 1 && a.experiment != 2) throw InputError("experiment must be 1 or 2");
  const SweepPreset preset = sweepPreset(a.experiment, a.full_scale);
  const fs::path dir(a.out_dir);
  int written = 0;
  auto emit = [&](const GeneratedInstance& gen, const std::string& name) {
    writeGenerated(gen, dir / (name + ".json"), dir / "witness" / (name + ".json"));
    ++written;
  };
  for (int n : preset.targets) {
    for (int rep = 0; rep < preset.repeats; ++rep) {
      GeneratorParams gp;
      gp.n_targets = n;
      gp.grid = a.grid;
      gp.seed = a.seed * 1000003ULL + static_cast<std::uint64_t>(a.experiment) * 100000ULL +
                static_cast<std::uint64_t>(n) * 100ULL + static_cast<std::uint64_t>(rep);
      const std::string stem = "e" + std::to_string(a.experiment) + "_n" + twoDigits(n);
      const std::string tail = "_r" + twoDigits(rep);
      if (a.experiment == 1) {
        gp.windows_per_target = 2;
        gp.sum_window_len = preset.sums.back();
        GeneratedInstance gen = generateInstance(gp);
        for (std::size_t k = preset.sums.size(); k-- > 0;) {
          const double sum = preset.sums[k];
          if (k + 1 < preset.sums.size()) gen = shortenWindows(gen, sum, gp.seed * 64 + k);
          emit(gen, stem + "_sum" + twoDigits(std::lround(sum)) + tail);
        }
      } else {
        gp.windows_per_target = 1;
        gp.sum_window_len = preset.split_base_sum;
        const GeneratedInstance base = generateInstance(gp);
        for (int k : preset.windows) {
          emit(splitWindows(base, k, gp.seed * 64 + static_cast<std::uint64_t>(k)),
               stem + "_w" + std::to_string(k) + tail);
        }
      }
    }
  }
  out << written << " instances written to " << dir.string() << '\n';
  return kExitFeasible;
}

struct BenchArgs {
  std::string dir;
  std::vector<std::string> solvers{"mtvg", "baseline"};
  std::string out_csv;
  double budget_s = 300.0;
  int jobs = 1;
};

struct BenchRow {
  std::string instance, solver, status;
  double wall_s = 0.0;
  std::optional<double> cost, visibility_s, twg_s, tree_s;
  std::optional<int> attempts;
};

inline constexpr const char* kBenchHeader =
    "instance,solver,status,wall_s,cost,visibility_s,twg_s,tree_s,attempts";

inline std::vector<fs::path> instanceFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "witness.json") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline BenchRow benchOne(const fs::path& file, const std::string& solver, double budget_s) {
  BenchRow row;
  row.instance = file.filename().string();
  row.solver = solver;
  try {
    const Instance inst = loadInstance(file.string());
    if (solver == "mtvg") {
      SolveOptions opts;
      opts.budget_s = budget_s;
      const SolveResult r = solve(inst, opts);
      row.status = toString(r.status);
      row.wall_s = r.wallSeconds();
      row.visibility_s = r.times.visibility_s;
      row.twg_s = r.times.twg_s;
      row.tree_s = r.times.tree_s;
      if (r.status == SolveStatus::Feasible) row.cost = r.solution.final_time;
    } else {
      BaselineOptions opts;
      opts.budget_s = budget_s;
      const BaselineResult r = baselineSolve(inst, opts);
      row.status = toString(r.status);
      row.wall_s = r.wallSeconds();
      row.attempts = static_cast<int>(r.attempts.size());
      if (r.status == BaselineStatus::Feasible) row.cost = r.solution.final_time;
    }
  } catch (const CapabilityError&) {
    row.status = "UNSUPPORTED";
  } catch (const std::exception&) {
    row.status = "ERROR";
  }
  return row;
}

inline void writeBenchCsv(const std::vector<BenchRow>& rows, std::ostream& os) {
  auto opt = [](const auto& v) { return v ? formatNumber(static_cast<double>(*v)) : std::string(); };
  os << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    os << r.instance << ',' << r.solver << ',' << r.status << ',' << formatNumber(r.wall_s) << ','
       << opt(r.cost) << ',' << opt(r.visibility_s) << ',' << opt(r.twg_s) << ',' << opt(r.tree_s)
       << ',' << (r.attempts ? std::to_string(*r.attempts) : std::string()) << '\n';
  }
}

/// Runs every (instance, solver) pair on a pool of `jobs` threads; each
/// solve stays single-threaded. Rows come out in file-name then solver order.
inline int cmdBench(const BenchArgs& a, std::ostream& out) {
  for (const std::string& s : a.solvers) {
    if (s != "mtvg" && s != "baseline") throw InputError("unknown solver '" + s + "'");
  }
  const std::vector<fs::path> files = instanceFiles(a.dir);
  std::vector<std::pair<fs::path, std::string>> tasks;
  for (const fs::path& f : files) {
    for (const std::string& s : a.solvers) tasks.emplace_back(f, s);
  }
  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      rows[i] = benchOne(tasks[i].first, tasks[i].second, a.budget_s);
    }
  };
  const int width = std::max(1, std::min<int>(a.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < width; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::ostringstream csv;
  writeBenchCsv(rows, csv);
  if (a.out_csv.empty()) {
    out << csv.str();
  } else {
    writeTextFile(a.out_csv, csv.str());
    out << rows.size() << " rows written to " << a.out_csv << '\n';
  }
  return kExitFeasible;
}

struct RenderArgs {
  std::string instance;
  std::string solution;
  std::string out_svg;
};

inline int cmdRender(const RenderArgs& a, std::ostream& out) {
  const Instance inst = loadInstance(a.instance);
  std::optional<Solution> sol;
  if (!a.solution.empty()) sol = loadSolution(a.solution);
  const std::string svg = renderSvg(inst, sol);
  if (a.out_svg.empty()) {
    out << svg;
  } else {
    writeTextFile(a.out_svg, svg);
  }
  return kExitFeasible;
}

struct AnalyzeArgs {
  std::string instance;
  std::string out_json;
  std::string csv_dir;
  int cap = kAnalysisTargetCap;
  std::optional<double> budget_s;
  bool json = false;
};

inline int cmdAnalyze(const AnalyzeArgs& a, std::ostream& out) {
  const Instance inst = loadInstance(a.instance);
  const Deadline deadline = a.budget_s ? Deadline(*a.budget_s) : Deadline();
  const Scene scene = buildScene(inst);
  UsableReport rep;
  try {
    const TimeWindowGraph gtw = buildTimeWindowGraph(scene, deadline);
    rep = usableFraction(scene, gtw, a.cap, deadline);
  } catch (const AnalysisError& e) {
    out << "INFEASIBLE " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const TimeoutError&) {
    out << "TIMEOUT\n";
    return kExitTimeout;
  }
  const Json j = reportJson(rep);
  if (!a.out_json.empty()) writeJsonFile(a.out_json, j);
  if (!a.csv_dir.empty()) {
    const fs::path dir(a.csv_dir);
    fs::create_directories(dir);
    std::ostringstream intervals, fractions, minimum;
    for (std::ostringstream* os : {&intervals, &fractions, &minimum}) *os << std::setprecision(17);
    writeUsableIntervalsCsv(rep, intervals);
    writeUsableFractionsCsv(rep, fractions);
    writeMinFractionCsv(rep, minimum);
    writeTextFile((dir / "intervals.csv").string(), intervals.str());
    writeTextFile((dir / "fractions.csv").string(), fractions.str());
    writeTextFile((dir / "min_fraction.csv").string(), minimum.str());
  }
  if (a.json) {
    out << j.dump() << '\n';
  } else {
    out << "min_fraction=" << formatNumber(rep.min_fraction) << " sequences=" << rep.sequences << '\n';
  }
  return kExitFeasible;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses arguments and runs one subcommand. Exit codes: 0 feasible/ok,
/// 1 input or generation error, 2 usage error, 3 infeasible, 4 timeout.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Moving-target TSP with obstacles: planner, baseline and instance tools"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Find a feasible tour with the tree search");
  solve_cmd->add_option("instance", solve_args.instance, "Instance JSON")->required();
  solve_cmd->add_option("--budget", solve_args.budget_s, "Wall-clock budget in seconds");
  solve_cmd->add_option("--out,--solution-out", solve_args.solution_out, "Solution JSON to write");
  solve_cmd->add_option("--stats", solve_args.stats_out, "Stats JSON to write");
  solve_cmd->add_flag("--no-lookahead", solve_args.no_lookahead, "Disable the lookahead prune");
  solve_cmd->add_flag("--timings", solve_args.timings, "Include wall-clock timings in stats");
  solve_cmd->add_flag("--json", solve_args.json, "Print stats JSON on stdout");

  BaselineArgs base_args;
  CLI::App* base_cmd = app.add_subcommand("baseline", "Sampled-points baseline with escalation");
  base_cmd->add_option("instance", base_args.instance, "Instance JSON")->required();
  base_cmd->add_option("--start-n", base_args.start_n, "Initial points per target")->check(CLI::PositiveNumber);
  base_cmd->add_option("--step", base_args.step, "Points added per escalation")->check(CLI::PositiveNumber);
  base_cmd->add_option("--budget", base_args.budget_s, "Wall-clock budget in seconds");
  base_cmd->add_option("--max-n", base_args.max_n, "Give up (INFEASIBLE) beyond this many points");
  base_cmd->add_option("--out,--solution-out", base_args.solution_out, "Solution JSON to write");
  base_cmd->add_option("--stats", base_args.stats_out, "Stats JSON to write");
  base_cmd->add_option("--attempts", base_args.attempts_out, "Attempts CSV to write");
  base_cmd->add_flag("--timings", base_args.timings, "Include wall-clock timings");
  base_cmd->add_flag("--json", base_args.json, "Print stats JSON on stdout");

  GenerateArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Generate one feasible instance");
  gen_cmd->add_option("--targets", gen_args.params.n_targets, "Number of targets");
  gen_cmd->add_option("--windows", gen_args.params.windows_per_target, "Windows per target");
  gen_cmd->add_option("--sum", gen_args.params.sum_window_len, "Sum of window lengths per target (s)");
  gen_cmd->add_option("--rows", gen_args.params.grid.rows, "Grid rows");
  gen_cmd->add_option("--cols", gen_args.params.grid.cols, "Grid columns");
  gen_cmd->add_option("--cell-size", gen_args.params.grid.cell_size, "Grid cell size (m)");
  gen_cmd->add_option("--occupancy", gen_args.params.grid.occupancy_fraction, "Occupied cell fraction");
  gen_cmd->add_option("--vmax", gen_args.params.v_max, "Agent speed limit (m/s)");
  gen_cmd->add_option("--beta", gen_args.params.beta, "Witness speed factor");
  gen_cmd->add_option("--seed", gen_args.params.seed, "Random seed");
  gen_cmd->add_option("--out", gen_args.out_dir, "Output directory");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Generate an experiment's instance set");
  sweep_cmd->add_option("--experiment", sweep_args.experiment, "1 (window sums) or 2 (window counts)")
      ->required();
  sweep_cmd->add_option("--out", sweep_args.out_dir, "Output directory");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Base seed");
  sweep_cmd->add_flag("--full-scale", sweep_args.full_scale, "10/20/30 targets, 10 instances per cell");
  sweep_cmd->add_option("--rows", sweep_args.grid.rows, "Grid rows");
  sweep_cmd->add_option("--cols", sweep_args.grid.cols, "Grid columns");

  BenchArgs bench_args;
  std::string solver_list = "mtvg,baseline";
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run solvers over a directory of instances");
  bench_cmd->add_option("dir", bench_args.dir, "Directory of instance JSON files")->required();
  bench_cmd->add_option("--solvers", solver_list, "Comma-separated subset of mtvg,baseline");
  bench_cmd->add_option("--out", bench_args.out_csv, "CSV file to write (stdout if omitted)");
  bench_cmd->add_option("--budget", bench_args.budget_s, "Per-run budget in seconds");
  bench_cmd->add_option("--jobs", bench_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  RenderArgs render_args;
  CLI::App* render_cmd = app.add_subcommand("render", "Draw an instance (and solution) as SVG");
  render_cmd->add_option("instance", render_args.instance, "Instance JSON")->required();
  render_cmd->add_option("--solution", render_args.solution, "Solution JSON to overlay");
  render_cmd->add_option("--out", render_args.out_svg, "SVG file to write (stdout if omitted)");

  AnalyzeArgs analyze_args;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Usable intervals and usable fractions");
  analyze_cmd->add_option("instance", analyze_args.instance, "Instance JSON")->required();
  analyze_cmd->add_option("--out", analyze_args.out_json, "Report JSON to write");
  analyze_cmd->add_option("--csv-dir", analyze_args.csv_dir, "Directory for the CSV reports");
  analyze_cmd->add_option("--cap", analyze_args.cap, "Largest target count accepted");
  analyze_cmd->add_option("--budget", analyze_args.budget_s, "Wall-clock budget in seconds");
  analyze_cmd->add_flag("--json", analyze_args.json, "Print report JSON on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitFeasible;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitFeasible;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmdSolve(solve_args, out);
    if (*base_cmd) return cmdBaseline(base_args, out);
    if (*gen_cmd) return cmdGenerate(gen_args, out);
    if (*sweep_cmd) return cmdSweep(sweep_args, out);
    if (*bench_cmd) {
      bench_args.solvers.clear();
      std::stringstream ss(solver_list);
      for (std::string s; std::getline(ss, s, ',');) {
        if (!s.empty()) bench_args.solvers.push_back(s);
      }
      return cmdBench(bench_args, out);
    }
    if (*render_cmd) return cmdRender(render_args, out);
    if (*analyze_cmd) return cmdAnalyze(analyze_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace mttspo::cli
