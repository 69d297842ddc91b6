#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path Scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("losscape_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(Scratch(), ec);
  }
};
const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI through the shell; `args` is appended verbatim.
Result RunCli(const std::string& args, const std::string& env = "") {
  const fs::path err = Scratch() / "stderr.txt";
  const std::string cmd = env + " '" LOSSCAPE_BIN "' " + args + " 2>'" + err.string() + "'";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = Slurp(err);
  return r;
}

json Analyze(const std::string& args) {
  const Result r = RunCli("analyze " + args);
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

TEST(Analyze, TrafficLight) {
  const json j = Analyze("'!r | !g'");
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["is_convex"], false);
  EXPECT_EQ(j["connected_components"]["count"], 1);
  EXPECT_EQ(j["betti"], json::parse("[1,0]"));
  EXPECT_EQ(j["prime_implicants"], json::parse(R"(["0*","*0"])"));
  EXPECT_EQ(j["prime_implicant_assignments"], json::parse(R"(["0-","-0"])"));
  EXPECT_EQ(j["num_possible_worlds"], 3);
  EXPECT_EQ(j["mixture_bounds"]["min_components"], 2);
}

TEST(Analyze, Builtins) {
  const json x = Analyze("--builtin xor");
  EXPECT_EQ(x["connected_components"]["count"], 2);
  EXPECT_EQ(x["betti"], json::parse("[2,0]"));
  EXPECT_EQ(Analyze("--builtin hole")["betti"], json::parse("[1,1,0]"));
  const json b1 = Analyze("--builtin appendix-b1");
  EXPECT_EQ(b1["prime_implicant_terms"], json::parse(R"(["a & b","a & c","b & !c"])"));
  EXPECT_EQ(b1["minimal_cover_terms"], json::parse(R"(["a & c","b & !c"])"));
  const json m = Analyze("--builtin mnist-add:3,2");
  EXPECT_EQ(m["num_possible_worlds"], 3);
  EXPECT_EQ(m["implicant_graph"]["edges"], 0);
  EXPECT_EQ(m["connected_components"]["count"], 3);
}

TEST(Analyze, ReportInvariants) {
  for (const char* args : {"'!r | !g'", "--builtin xor", "--builtin hole", "'a & !b & c'",
                           "'(a -> b) & (b -> c)'"}) {
    const json j = Analyze(args);
    EXPECT_EQ(j["is_convex"].get<bool>(), j["prime_implicants"].size() == 1) << args;
    EXPECT_EQ(j["betti"][0], j["connected_components"]["count"]) << args;
  }
}

TEST(Analyze, JsonRoundTrip) {
  const json first = json::parse(RunCli("analyze --builtin hole").out);
  const json second = json::parse(first.dump());
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.dump(), second.dump());
  // Timings aside, pretty and compact output carry the same document.
  json compact = json::parse(RunCli("analyze --compact --builtin hole").out);
  json pretty = first;
  compact.erase("elapsed_ms");
  pretty.erase("elapsed_ms");
  EXPECT_EQ(compact, pretty);
}

TEST(Analyze, SkipHomology) {
  const json j = Analyze("--skip-homology --builtin hole");
  EXPECT_FALSE(j.contains("betti"));
  EXPECT_TRUE(j.contains("prime_implicants"));
}

TEST(Analyze, VarOrder) {
  const json j = Analyze("--vars g,r '!r | !g'");
  EXPECT_EQ(j["vars"], json::parse(R"(["g","r"])"));
}

TEST(Errors, ExitCodesAndJson) {
  Result r = RunCli("analyze 'a & (b |'");
  EXPECT_EQ(r.code, 2);
  json e = json::parse(r.err);
  EXPECT_EQ(e["error"], "SyntaxError");
  EXPECT_EQ(e["offset"], 8);

  r = RunCli("analyze 'a & !a'");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"], "Unsatisfiable");

  r = RunCli("analyze 'a & b & c & d'", "LOSSCAPE_MAX_N=3");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(json::parse(r.err)["error"], "LimitExceeded");

  r = RunCli("analyze --builtin nonsense");
  EXPECT_EQ(r.code, 2);

  r = RunCli("experiment --runs 0");
  EXPECT_EQ(r.code, 2);

  r = RunCli("landscape a");
  EXPECT_EQ(r.code, 6);
  EXPECT_EQ(json::parse(r.err)["error"], "WrongDimension");

  r = RunCli("frobnicate");
  EXPECT_NE(r.code, 0);
}

TEST(Errors, IoFailure) {
  const fs::path blocker = Scratch() / "blocker";
  std::ofstream(blocker) << "x";
  const Result r =
      RunCli("experiment --runs 1 --iters 1 --out-dir '" + (blocker / "sub").string() + "'");
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(json::parse(r.err)["error"], "IoError");
}

TEST(Experiment, WritesFiles) {
  const fs::path out = Scratch() / "exp";
  const Result r = RunCli(
      "experiment --builtin traffic --model independent --model expressive --loss semantic "
      "--runs 4 --iters 200 --lr 0.1 --seed 7 --trajectories --out-dir '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("independent"), std::string::npos);
  const std::string endpoints = Slurp(out / "endpoints.csv");
  EXPECT_EQ(endpoints.rfind("run_id,model,loss_kind,alpha,seed,final_loss,dist_Cphi,"
                            "nearest_facet,p_00,p_10,p_01,p_11",
                            0),
            0u);
  EXPECT_EQ(std::count(endpoints.begin(), endpoints.end(), '\n'), 9);
  EXPECT_EQ(Slurp(out / "trajectories.csv").rfind("run_id,step,loss,p_00", 0), 0u);
  const json report = json::parse(Slurp(out / "report.json"));
  EXPECT_EQ(report["seed"], 7);
  EXPECT_EQ(report["models"].size(), 2u);

  // Same seed, same bytes.
  const fs::path again = Scratch() / "exp2";
  RunCli("experiment --builtin traffic --model independent --model expressive --loss semantic "
      "--runs 4 --iters 200 --lr 0.1 --seed 7 --trajectories --threads 2 --out-dir '" +
      again.string() + "'");
  EXPECT_EQ(Slurp(again / "endpoints.csv"), endpoints);
}

TEST(Experiment, EntropyLossFlags) {
  const fs::path out = Scratch() / "entropy";
  const Result r = RunCli(
      "experiment --builtin traffic --model expressive --loss semantic-entropy --alpha 0.1 "
      "--runs 2 --iters 50 --out-dir '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(Slurp(out / "report.json"));
  EXPECT_EQ(report["config"]["loss"], "semantic_entropy");
  EXPECT_EQ(report["config"]["alpha"], 0.1);
  EXPECT_EQ(RunCli("experiment --loss semantic-entropy --alpha 2 --runs 1 --iters 1 --out-dir '" +
                out.string() + "'")
                .code,
            2);
}

struct GridPoint {
  double r, g, loss;
};

std::vector<GridPoint> ReadGrid(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "mu_0,mu_1,loss");
  std::vector<GridPoint> out;
  while (std::getline(in, line)) {
    GridPoint p{};
    char c1, c2;
    std::istringstream ls(line);
    ls >> p.r >> c1 >> p.g >> c2;
    std::string tail;
    ls >> tail;
    p.loss = tail == "inf" ? INFINITY : std::stod(tail);
    out.push_back(p);
  }
  return out;
}

TEST(Landscape, SemanticMinimaOnAxes) {
  const Result r = RunCli("landscape '!r | !g' --resolution 21");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto grid = ReadGrid(r.out);
  ASSERT_EQ(grid.size(), 21u * 21u);
  for (const auto& p : grid) {
    const bool on_axis = p.r == 0.0 || p.g == 0.0;
    EXPECT_EQ(p.loss == 0.0, on_axis) << p.r << "," << p.g;
  }
}

TEST(Landscape, LukasiewiczZeroRegion) {
  const Result r =
      RunCli("landscape '!r | !g' --loss fuzzy --logic lukasiewicz --form one_minus --resolution 41");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& p : ReadGrid(r.out)) {
    const int i = static_cast<int>(std::lround(p.r * 40)), j = static_cast<int>(std::lround(p.g * 40));
    EXPECT_EQ(p.loss == 0.0, i + j <= 40) << p.r << "," << p.g;
  }
}

TEST(Landscape, SummaryWithOutFile) {
  const fs::path out = Scratch() / "grid.csv";
  const Result r = RunCli("landscape '!r | !g' --loss fuzzy --logic lukasiewicz --out '" +
                       out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const json summary = json::parse(r.out);
  EXPECT_EQ(summary["zero_loss_points_with_sum_above_1"], 0);
  EXPECT_EQ(ReadGrid(Slurp(out)).size(), 201u * 201u);
}

TEST(Verify, SmokeRun) {
  const Result r = RunCli("verify --max-n 3 --cases 10");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("7 suites, 0 failures"), std::string::npos) << r.out;
}

TEST(Verify, InjectedBugIsCaught) {
  const Result r = RunCli("verify --inject-bug --suite possibility --cases 50");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.find(", 0 failures"), std::string::npos) << r.out;
}

}  // namespace
