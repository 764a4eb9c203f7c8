#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "mttspo/cli.hpp"

using namespace mttspo;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun runCli(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"mttspo"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mttspo_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string writeInstance(const std::string& name, const std::string& json) const {
    writeTextFile(path(name), json);
    return path(name);
  }

  std::string generated(int targets = 4, int windows = 2, double sum = 10, int seed = 3) const {
    const std::string out = path("gen" + std::to_string(seed));
    EXPECT_EQ(runCli({"generate", "--targets", std::to_string(targets), "--windows",
                      std::to_string(windows), "--sum", std::to_string(sum), "--seed",
                      std::to_string(seed), "--out", out})
                  .code,
              0);
    return out + "/instance.json";
  }

  fs::path dir_;
};

constexpr const char* kDepotOnly = R"({"v_max":1,"depot":[2,3],"targets":[]})";
constexpr const char* kFarApart =
    R"({"v_max":1,"depot":[0,0],"targets":[)"
    R"({"id":1,"windows":[{"t0":10,"tf":11,"p0":[10,0],"vel":[0,0]}]},)"
    R"({"id":2,"windows":[{"t0":10,"tf":11,"p0":[-10,0],"vel":[0,0]}]}]})";

}  // namespace

TEST_F(CliTest, SolveDepotOnly) {
  const std::string inst = writeInstance("empty.json", kDepotOnly);
  const CliRun r = runCli({"solve", inst, "--out", path("sol.json"), "--stats", path("stats.json")});
  EXPECT_EQ(r.code, cli::kExitFeasible) << r.err;
  const Solution sol = loadSolution(path("sol.json"));
  EXPECT_EQ(sol.final_time, 0.0);
  const Json stats = readJsonFile(path("stats.json"));
  EXPECT_EQ(stats.at("status"), "FEASIBLE");
  EXPECT_FALSE(stats.contains("timings"));
}

TEST_F(CliTest, MalformedFileIsInputError) {
  const std::string inst = writeInstance("bad.json", R"({"v_max": )");
  EXPECT_EQ(runCli({"solve", inst}).code, cli::kExitError);
  EXPECT_EQ(runCli({"baseline", inst}).code, cli::kExitError);
  EXPECT_EQ(runCli({"solve", path("missing.json")}).code, cli::kExitError);
}

TEST_F(CliTest, UsageErrorsAndHelp) {
  EXPECT_EQ(runCli({}).code, cli::kExitUsage);
  EXPECT_EQ(runCli({"solve"}).code, cli::kExitUsage);
  EXPECT_EQ(runCli({"frobnicate"}).code, cli::kExitUsage);
  const CliRun help = runCli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("solve"), std::string::npos);
}

TEST_F(CliTest, SolveGeneratedInstanceValidates) {
  const std::string inst = generated();
  const CliRun r = runCli({"solve", inst, "--out", path("sol.json"), "--json"});
  ASSERT_EQ(r.code, cli::kExitFeasible) << r.err;
  EXPECT_TRUE(validateSolution(loadInstance(inst), loadSolution(path("sol.json"))).ok());
  const Json stats = Json::parse(r.out);
  EXPECT_EQ(stats.at("valid"), true);
  EXPECT_GT(stats.at("window_nodes").get<int>(), 1);
}

TEST_F(CliTest, SolveInfeasibleAndTimeout) {
  const std::string far = writeInstance("far.json", kFarApart);
  EXPECT_EQ(runCli({"solve", far}).code, cli::kExitInfeasible);
  EXPECT_EQ(runCli({"solve", generated(), "--budget", "0"}).code, cli::kExitTimeout);
}

TEST_F(CliTest, NoLookaheadSameStatus) {
  const std::string inst = generated(5, 2, 6, 8);
  const CliRun a = runCli({"solve", inst, "--json"});
  const CliRun b = runCli({"solve", inst, "--json", "--no-lookahead"});
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(Json::parse(b.out).at("prunes"), 0);
  EXPECT_EQ(Json::parse(b.out).at("lookahead"), false);
}

TEST_F(CliTest, BaselineEasyBudgetAndAttempts) {
  const std::string easy = writeInstance(
      "easy.json",
      R"({"v_max":1,"depot":[0,0],"targets":[{"id":1,"windows":[{"t0":0,"tf":50,"p0":[2,0],"vel":[0,0]}]}]})");
  const CliRun r = runCli({"baseline", easy, "--json"});
  ASSERT_EQ(r.code, cli::kExitFeasible) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("final_n"), 10);
  EXPECT_EQ(runCli({"baseline", easy, "--budget", "0"}).code, cli::kExitTimeout);

  const std::string inst = generated(4, 2, 4, 9);
  ASSERT_EQ(runCli({"baseline", inst, "--attempts", path("att.csv"), "--stats", path("st.json")}).code,
            cli::kExitFeasible);
  std::istringstream csv(slurp(path("att.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n_per_target,wall_s,status");
  int prev = 0;
  while (std::getline(csv, line)) {
    const int n = std::stoi(line.substr(0, line.find(',')));
    EXPECT_EQ(n, prev + 10);
    prev = n;
  }
  EXPECT_EQ(readJsonFile(path("st.json")).at("final_n"), prev);
}

TEST_F(CliTest, BaselineMaxNGivesInfeasible) {
  const std::string far = writeInstance("far.json", kFarApart);
  EXPECT_EQ(runCli({"baseline", far, "--max-n", "20"}).code, cli::kExitInfeasible);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::string inst = generated(5, 2, 8, 12);
  for (const char* cmd : {"solve", "baseline"}) {
    ASSERT_EQ(runCli({cmd, inst, "--out", path("a_sol.json"), "--stats", path("a_st.json")}).code, 0);
    ASSERT_EQ(runCli({cmd, inst, "--out", path("b_sol.json"), "--stats", path("b_st.json")}).code, 0);
    EXPECT_EQ(slurp(path("a_sol.json")), slurp(path("b_sol.json"))) << cmd;
    EXPECT_EQ(slurp(path("a_st.json")), slurp(path("b_st.json"))) << cmd;
  }
  const std::string again = generated(5, 2, 8, 12);
  EXPECT_EQ(slurp(inst), slurp(again));
}

TEST_F(CliTest, TimingsOnlyOnRequest) {
  const std::string inst = generated();
  ASSERT_EQ(runCli({"solve", inst, "--stats", path("st.json"), "--timings"}).code, 0);
  const Json stats = readJsonFile(path("st.json"));
  ASSERT_TRUE(stats.contains("timings"));
  EXPECT_TRUE(stats.at("timings").contains("twg_s"));
}

TEST_F(CliTest, SweepExperimentOne) {
  const CliRun r = runCli({"sweep", "--experiment", "1", "--out", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli::instanceFiles(path("s")).size(), 105u);
  std::set<std::string> names;
  for (const fs::path& f : cli::instanceFiles(path("s"))) {
    names.insert(f.filename().string());
    EXPECT_TRUE(fs::exists(dir_ / "s" / "witness" / f.filename()));
  }
  EXPECT_TRUE(names.count("e1_n04_sum02_r00.json"));
  EXPECT_TRUE(names.count("e1_n08_sum26_r04.json"));
  ASSERT_EQ(runCli({"sweep", "--experiment", "1", "--out", path("t")}).code, 0);
  for (const std::string& n : names) {
    EXPECT_EQ(slurp(dir_ / "s" / n), slurp(dir_ / "t" / n)) << n;
  }
}

TEST_F(CliTest, SweepExperimentTwoSplits) {
  ASSERT_EQ(runCli({"sweep", "--experiment", "2", "--out", path("s")}).code, 0);
  const auto files = cli::instanceFiles(path("s"));
  EXPECT_EQ(files.size(), 90u);
  const Instance six = loadInstance(path("s/e2_n06_w6_r01.json"));
  for (const Target& t : six.targets) {
    EXPECT_EQ(t.windows.size(), 6u);
    double sum = 0.0;
    for (const TargetWindow& w : t.windows) sum += w.length();
    EXPECT_NEAR(sum, 22.0, 1e-9);
  }
  EXPECT_EQ(runCli({"sweep", "--experiment", "3", "--out", path("x")}).code, cli::kExitError);
}

TEST_F(CliTest, BenchEmptyAndTwoRows) {
  fs::create_directories(dir_ / "empty");
  const CliRun empty = runCli({"bench", path("empty")});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, std::string(cli::kBenchHeader) + "\n");

  fs::create_directories(dir_ / "one");
  fs::copy_file(generated(), dir_ / "one" / "inst.json");
  const CliRun a = runCli({"bench", path("one"), "--jobs", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  std::istringstream lines(a.out);
  std::vector<std::string> rows;
  for (std::string l; std::getline(lines, l);) rows.push_back(l);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("inst.json,mtvg,FEASIBLE,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("inst.json,baseline,FEASIBLE,", 0), 0u);

  // Status and cost columns repeat exactly.
  const CliRun b = runCli({"bench", path("one"), "--out", path("b.csv")});
  ASSERT_EQ(b.code, 0);
  auto statusCost = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string out;
    for (std::string l; std::getline(in, l);) {
      std::vector<std::string> f;
      std::stringstream ss(l);
      for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
      out += f[0] + f[1] + f[2] + (f.size() > 4 ? f[4] : "") + "\n";
    }
    return out;
  };
  EXPECT_EQ(statusCost(a.out), statusCost(slurp(path("b.csv"))));
  EXPECT_EQ(runCli({"bench", path("one"), "--solvers", "gurobi"}).code, cli::kExitError);
}

TEST_F(CliTest, RenderWritesWellFormedSvg) {
  const std::string inst = generated();
  ASSERT_EQ(runCli({"solve", inst, "--out", path("sol.json")}).code, 0);
  ASSERT_EQ(runCli({"render", inst, "--out", path("a.svg")}).code, 0);
  ASSERT_EQ(runCli({"render", inst, "--solution", path("sol.json"), "--out", path("b.svg")}).code, 0);
  for (const char* f : {"a.svg", "b.svg"}) {
    boost::property_tree::ptree tree;
    EXPECT_NO_THROW(boost::property_tree::read_xml(path(f), tree)) << f;
  }
  EXPECT_EQ(slurp(path("a.svg")).find("<polyline"), std::string::npos);
  EXPECT_NE(slurp(path("b.svg")).find("<polyline"), std::string::npos);
}

TEST_F(CliTest, AnalyzeReportAndCsv) {
  const std::string inst = generated(4, 2, 6, 14);
  const CliRun r = runCli({"analyze", inst, "--out", path("rep.json"), "--csv-dir", path("csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rep = readJsonFile(path("rep.json"));
  EXPECT_EQ(rep.at("targets").size(), 4u);
  EXPECT_GE(rep.at("min_fraction").get<double>(), 0.0);
  EXPECT_EQ(slurp(path("csv/fractions.csv")).rfind("target,fraction\n", 0), 0u);
  EXPECT_EQ(slurp(path("csv/intervals.csv")).rfind("target,interval_lo,interval_hi\n", 0), 0u);
  EXPECT_EQ(slurp(path("csv/min_fraction.csv")).rfind("min_fraction\n", 0), 0u);
  const std::string far = writeInstance("far.json", kFarApart);
  EXPECT_EQ(runCli({"analyze", far}).code, cli::kExitInfeasible);
}
