// Command-line front end: analyze | experiment | landscape | verify.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "losscape/cli/builtins.h"
#include "losscape/cli/landscape.h"
#include "losscape/cli/report.h"
#include "losscape/cli/verify.h"
#include "losscape/optimize.h"

namespace {

using namespace losscape;

enum Exit {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUnsat = 3,
  kLimit = 4,
  kIo = 5,
  kNotTwoVars = 6,
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

class WrongDimension : public Error {
 public:
  explicit WrongDimension(const std::string& message)
      : Error("WrongDimension", message) {}
};

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const SyntaxError*>(&e) || dynamic_cast<const UnknownVariable*>(&e) ||
      dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const InvalidRange*>(&e) ||
      dynamic_cast<const InfeasibleInit*>(&e)) {
    return kUsage;
  }
  if (dynamic_cast<const Unsatisfiable*>(&e)) return kUnsat;
  if (dynamic_cast<const LimitExceeded*>(&e) ||
      dynamic_cast<const PrimeImplicantOverflow*>(&e)) {
    return kLimit;
  }
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const WrongDimension*>(&e)) return kNotTwoVars;
  return kFailure;
}

struct FormulaFlags {
  std::string text;
  std::string builtin;
  std::string vars;  // comma separated

  void add(CLI::App* app, bool positional = true) {
    if (positional) app->add_option("formula", text, "Formula text, e.g. \"!r | !g\"");
    app->add_option("--builtin", builtin,
                    "traffic | xor | hole | appendix-b1 | mnist-add:M,S");
    app->add_option("--vars", vars, "Variable order (comma separated)");
  }

  Formula resolve(const std::string& fallback = {}) const {
    if (!text.empty() && !builtin.empty()) {
      throw InvalidArgument("give either a formula or --builtin, not both");
    }
    if (!builtin.empty()) return cli::builtin_formula(builtin);
    if (!text.empty()) {
      if (vars.empty()) return parse(text);
      std::vector<std::string> order;
      std::stringstream ss(vars);
      for (std::string name; std::getline(ss, name, ',');) order.push_back(name);
      return parse(text, order);
    }
    if (!fallback.empty()) return cli::builtin_formula(fallback);
    throw InvalidArgument("no formula given");
  }
};

struct LossFlags {
  std::string loss = "semantic";
  double alpha = 0.0;
  std::string variant = "cross_entropy";
  std::string logic = "product";
  std::string form = "one_minus";

  void add(CLI::App* app) {
    app->add_option("--loss", loss, "semantic | semantic-entropy | fuzzy")
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Entropy regularization weight in [0, 1]");
    app->add_option("--variant", variant, "cross_entropy | paper_literal")
        ->capture_default_str();
    app->add_option("--logic", logic, "product | goedel | lukasiewicz")
        ->capture_default_str();
    app->add_option("--form", form, "one_minus | neg_log")->capture_default_str();
  }

  LossSpec resolve() const {
    if (loss == "semantic") return LossSpec::Semantic();
    if (loss == "semantic-entropy" || loss == "semantic_entropy") {
      return LossSpec::SemanticEntropy(alpha, parse_entropy_variant(variant));
    }
    if (loss == "fuzzy") {
      return LossSpec::Fuzzy(parse_fuzzy_logic(logic), parse_fuzzy_form(form));
    }
    throw InvalidArgument("unknown loss '" + loss + "'");
  }
};

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void Close(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

int Analyze(const FormulaFlags& ff, bool skip_homology, bool verify_smith,
            int indent) {
  const auto start = std::chrono::steady_clock::now();
  const Formula f = ff.resolve();
  const double parse_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  cli::AnalyzeOptions opts;
  opts.skip_homology = skip_homology;
  opts.verify_smith = verify_smith;
  opts.limits = Limits::FromEnv();
  std::cout << cli::analysis_report(f, opts, parse_ms).dump(indent) << '\n';
  return kOk;
}

struct ExperimentFlags {
  FormulaFlags formula;
  LossFlags loss;
  std::vector<std::string> models{"independent"};
  double lr = 0.1;
  int iters = 10000;
  int runs = 256;
  std::uint64_t seed = 7;
  double impossible_mass = 0.7;
  std::string out_dir = "out";
  bool trajectories = false;
  int threads = 0;
};

int Experiment(const ExperimentFlags& ef) {
  const Formula f = ef.formula.resolve("traffic");
  RunConfig cfg;
  cfg.loss = ef.loss.resolve();
  cfg.lr = ef.lr;
  cfg.iters = ef.iters;
  cfg.num_runs = ef.runs;
  cfg.seed = ef.seed;
  cfg.init.impossible_mass = ef.impossible_mass;
  cfg.capture_trajectory = ef.trajectories;
  cfg.threads = ef.threads;
  cfg.validate();
  std::vector<ModelSpec> models;
  for (const auto& m : ef.models) models.push_back(parse_model(m, f.n()));

  const ExperimentReport report = experiment(f, models, cfg);

  const std::filesystem::path dir(ef.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = OpenOut(dir / "endpoints.csv");
    write_endpoints_csv(out, f, report);
    Close(out, dir / "endpoints.csv");
  }
  if (ef.trajectories) {
    auto out = OpenOut(dir / "trajectories.csv");
    write_trajectories_csv(out, f, report);
    Close(out, dir / "trajectories.csv");
  }
  {
    auto out = OpenOut(dir / "report.json");
    out << cli::experiment_report_json(report).dump(2) << '\n';
    Close(out, dir / "report.json");
  }

  std::printf("%-12s %6s %9s %11s %12s %14s\n", "model", "runs", "failures",
              "possible", "near_vertex", "mean_imp_mass");
  for (const auto& mr : report.models) {
    const ModelSummary& s = mr.summary;
    std::printf("%-12s %6d %9d %11.4f %12.4f %14.6g\n", s.model.name().c_str(),
                s.runs, s.failures, s.fraction_possible, s.near_vertex_fraction,
                s.mean_impossible_mass);
  }
  return kOk;
}

int Landscape(const FormulaFlags& ff, const LossFlags& lf, int resolution,
              const std::string& out_path) {
  const Formula f = ff.resolve();
  if (f.n() != 2) {
    throw WrongDimension("landscapes need exactly 2 variables, got " +
                         std::to_string(f.n()));
  }
  cli::LandscapeOptions opts;
  opts.loss = lf.resolve();
  opts.resolution = resolution;
  const auto grid = cli::landscape_grid(f, opts);
  if (out_path.empty() || out_path == "-") {
    cli::write_landscape_csv(std::cout, grid);
    return kOk;
  }
  auto out = OpenOut(out_path);
  cli::write_landscape_csv(out, grid);
  Close(out, out_path);

  std::size_t zeros = 0, zeros_off_sum = 0;
  for (const auto& pt : grid) {
    if (pt.loss <= 1e-12) {
      ++zeros;
      if (pt.i + pt.j > resolution - 1) ++zeros_off_sum;
    }
  }
  nlohmann::json summary = {{"schema", cli::kSchemaVersion},
                            {"formula", f.to_string()},
                            {"loss", opts.loss.name()},
                            {"resolution", resolution},
                            {"points", grid.size()},
                            {"zero_loss_points", zeros},
                            {"out", out_path}};
  if (opts.loss.kind == LossKind::kFuzzy &&
      opts.loss.logic == FuzzyLogic::kLukasiewicz) {
    summary["zero_loss_points_with_sum_above_1"] = zeros_off_sum;
    summary["note"] =
        "zero-loss region evaluated as mu_0 + mu_1 <= 1; a bound of 0.5 is "
        "sometimes quoted for this loss and does not match the formula";
  }
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int Verify(const cli::VerifyOptions& opts, const std::vector<std::string>& suites) {
  cli::VerifyReport report;
  if (suites.empty()) {
    report = cli::run_verify(opts);
  } else {
    for (const auto& s : suites) report.suites.push_back(cli::run_suite(s, opts));
  }
  for (const auto& s : report.suites) {
    std::printf("%-13s %5d cases %4d failures %8.2fs\n", s.name.c_str(), s.cases,
                s.failures, s.seconds);
    for (const auto& c : s.counterexamples) std::printf("  counterexample: %s\n", c.c_str());
  }
  std::printf("%zu suites, %d failures\n", report.suites.size(), report.failures());
  return report.failures() == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural analysis and loss landscapes of propositional constraints"};
  app.require_subcommand(1);

  FormulaFlags analyze_formula;
  bool skip_homology = false, verify_smith = false, compact = false;
  auto* analyze = app.add_subcommand("analyze", "Structural report as JSON");
  analyze_formula.add(analyze);
  analyze->add_flag("--skip-homology", skip_homology, "Omit Betti numbers and torsion");
  analyze->add_flag("--verify-smith", verify_smith, "Check every Smith form");
  analyze->add_flag("--compact", compact, "Single-line JSON");

  ExperimentFlags ef;
  auto* exp = app.add_subcommand("experiment", "Gradient descent runs");
  ef.formula.add(exp, false);
  exp->add_option("--formula", ef.formula.text, "Formula text (default: traffic)");
  ef.loss.add(exp);
  exp->add_option("--model", ef.models, "independent | expressive | mixture[:K]")
      ->capture_default_str();
  exp->add_option("--lr", ef.lr)->capture_default_str()->check(CLI::PositiveNumber);
  exp->add_option("--iters", ef.iters)->capture_default_str()->check(CLI::NonNegativeNumber);
  exp->add_option("--runs", ef.runs)->capture_default_str()->check(CLI::PositiveNumber);
  exp->add_option("--seed", ef.seed)->capture_default_str();
  exp->add_option("--impossible-mass", ef.impossible_mass)->capture_default_str();
  exp->add_option("--out-dir", ef.out_dir)->capture_default_str();
  exp->add_flag("--trajectories", ef.trajectories, "Also write trajectories.csv");
  exp->add_option("--threads", ef.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  FormulaFlags land_formula;
  LossFlags land_loss;
  int resolution = 201;
  std::string land_out;
  auto* land = app.add_subcommand("landscape", "Loss grid CSV for two variables");
  land_formula.add(land);
  land_loss.add(land);
  land->add_option("--resolution", resolution, "Grid points per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));
  land->add_option("--out", land_out, "CSV path (default: stdout)");

  cli::VerifyOptions vopts;
  std::vector<std::string> suites;
  auto* verify = app.add_subcommand("verify", "Randomized cross-module oracle suites");
  verify->add_option("--max-n", vopts.max_n)->capture_default_str()->check(CLI::Range(1, 12));
  verify->add_option("--cases", vopts.cases)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--seed", vopts.seed)->capture_default_str();
  verify->add_option("--suite", suites, "Run only the named suites");
  verify->add_flag("--inject-bug", vopts.inject_bug, "Corrupt one check (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json j = {{"error", "UsageError"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return kUsage;
  }

  try {
    if (*analyze) return Analyze(analyze_formula, skip_homology, verify_smith, compact ? -1 : 2);
    if (*exp) return Experiment(ef);
    if (*land) return Landscape(land_formula, land_loss, resolution, land_out);
    if (*verify) return Verify(vopts, suites);
  } catch (const std::exception& e) {
    std::cerr << cli::error_json(e).dump() << '\n';
    return ExitCodeFor(e);
  }
  return kUsage;
}
