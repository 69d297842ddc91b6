// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "losscape/cli/builtins.h"
#include "losscape/cli/landscape.h"
#include "losscape/cli/report.h"
#include "losscape/cli/verify.h"
#include "losscape/optimize.h"

namespace losscape {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double SecondsSince(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void Report(const std::string& name, const Outcome& o) {
  std::printf("%s  %-44s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

void Info(const std::string& name, const std::string& detail) {
  std::printf("INFO  %-44s %s\n", name.c_str(), detail.c_str());
}

void Check(const std::string& name, const std::function<Outcome()>& fn) {
  try {
    Report(name, fn());
  } catch (const std::exception& e) {
    Report(name, {false, std::string("threw: ") + e.what()});
  }
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// ---- golden structural analyses ------------------------------------------

Outcome Golden(const Formula& f, const std::function<std::string(const json&)>& mismatch) {
  const auto start = Clock::now();
  const json r = cli::analysis_report(f, {});
  const double secs = SecondsSince(start);
  std::string why = mismatch(r);
  if (secs >= 1.0) why += " took " + Fmt("%.3f s", secs);
  return {why.empty(), why.empty() ? Fmt("%.1f ms", secs * 1e3) : why};
}

std::string Expect(const json& r, const char* key, const json& expected) {
  if (r.at(key) == expected) return "";
  return std::string(key) + "=" + r.at(key).dump() + " want " + expected.dump() + "; ";
}

void GoldenCriteria() {
  Check("golden: traffic light", [] {
    return Golden(parse("!r | !g"), [](const json& r) {
      return Expect(r, "prime_implicant_terms", json::parse(R"(["!r","!g"])")) +
             Expect(r, "is_convex", false) +
             Expect(r["connected_components"], "count", 1) + Expect(r, "betti", {1, 0}) +
             Expect(r["mixture_bounds"], "min_components", 2);
    });
  });
  Check("golden: xor", [] {
    return Golden(cli::builtin_formula("xor"), [](const json& r) {
      return Expect(r, "prime_implicants", json::parse(R"(["10","01"])")) +
             Expect(r["connected_components"], "count", 2) + Expect(r, "betti", {2, 0});
    });
  });
  Check("golden: minimal cover misses a possible point", [] {
    const Formula f = cli::builtin_formula("appendix-b1");
    Outcome o = Golden(f, [](const json& r) {
      return Expect(r, "prime_implicant_terms", json::parse(R"(["a & b","a & c","b & !c"])")) +
             Expect(r, "minimal_cover_terms", json::parse(R"(["a & c","b & !c"])"));
    });
    const std::vector<double> mu = {1.0, 1.0, 0.5};
    const auto cover = minimal_cover(prime_implicants(f), f);
    CubicalSet cover_set;
    cover_set.n = f.n();
    for (const auto& pa : cover.items) cover_set.facets.push_back(cube_of(pa, f.n()));
    const bool in_set = contains(cubical_set(f), mu);
    const bool in_cover = contains(cover_set, mu);
    if (!in_set || in_cover) {
      o.pass = false;
      o.detail += " (1,1,0.5): in C=" + std::to_string(in_set) +
                  " in cover=" + std::to_string(in_cover);
    }
    return o;
  });
  Check("golden: hole", [] {
    return Golden(cli::builtin_formula("hole"),
                  [](const json& r) { return Expect(r, "betti", {1, 1, 0}); });
  });
  Check("golden: mnist-add(3, 2)", [] {
    return Golden(mnist_add_formula(3, 2), [](const json& r) {
      return Expect(r, "num_possible_worlds", 3) + Expect(r["implicant_graph"], "edges", 0) +
             Expect(r["connected_components"], "count", 3);
    });
  });
}

// ---- property suites ------------------------------------------------------

void PropertyCriteria() {
  const auto start = Clock::now();
  cli::VerifyOptions opts;
  opts.max_n = 6;
  opts.cases = 200;
  opts.seed = 1;
  const auto labels = std::vector<std::pair<std::string, std::string>>{
      {"possibility", "possibility <=> WMC 1 <=> membership"},
      {"conditioning", "conditional representability"},
      {"convexity", "convexity <=> single prime implicant"},
      {"connectivity", "graph = 1-skeleton = betti0"},
      {"boundary", "boundary squares to zero, Smith form"},
      {"gradients", "gradients vs central differences"},
      {"minima", "zero loss <=> prime implicant cubes"}};
  for (const auto& [suite, label] : labels) {
    Check("property: " + label, [&] {
      const auto r = cli::run_suite(suite, opts);
      std::string detail = std::to_string(r.cases) + " cases, " +
                           std::to_string(r.failures) + " counterexamples";
      if (!r.counterexamples.empty()) detail += "; e.g. " + r.counterexamples.front();
      return Outcome{r.failures == 0 && r.cases >= 200, detail};
    });
  }

  Check("property: Jensen over the simplex", [] {
    std::mt19937_64 rng(1001);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    double worst = -INFINITY;
    for (int c = 0; c < 1000; ++c) {
      const Formula f = cli::random_formula(rng, 6);
      const TruthTable table(f);
      auto draw = [&] {
        std::vector<double> p(table.num_worlds());
        double total = 0.0;
        for (double& x : p) total += x = gamma(rng);
        for (double& x : p) x /= total;
        return DenseDistribution(p);
      };
      const auto p1 = draw(), p2 = draw();
      const double lambda = u(rng);
      std::vector<double> mix(p1.probs.size());
      for (std::size_t w = 0; w < mix.size(); ++w) mix[w] = lambda * p1[w] + (1 - lambda) * p2[w];
      const double gap = semantic_loss(table, DenseDistribution(mix)) -
                         (lambda * semantic_loss(table, p1) + (1 - lambda) * semantic_loss(table, p2));
      worst = std::max(worst, gap);
      if (gap > 1e-12) ++violations;
    }
    return Outcome{violations == 0, "1000 triples, max gap " + Fmt("%.3g", worst)};
  });

  Check("property: marginals of densify are the identity", [] {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
      std::vector<double> mu(1 + c % 10);
      for (double& x : mu) x = u(rng);
      const auto back = marginals(densify(IndependentParams(mu)));
      for (std::size_t i = 0; i < mu.size(); ++i) worst = std::max(worst, std::abs(back.mu[i] - mu[i]));
    }
    return Outcome{worst <= 1e-12, "1000 points, n <= 10, max error " + Fmt("%.3g", worst)};
  });

  Check("property: simplex_lower <= min_components <= upper", [] {
    std::mt19937_64 rng(1003);
    int low_above = 0, cover_above = 0;
    std::string example;
    for (int c = 0; c < 200; ++c) {
      const Formula f = cli::random_formula(rng, 6);
      const auto b = mixture_bounds(f);
      if (b.min_components > b.upper) ++cover_above;
      if (b.simplex_lower > b.min_components) {
        if (example.empty()) {
          example = f.to_string() + " gives (" + std::to_string(b.simplex_lower) + ", " +
                    std::to_string(b.min_components) + ", " + std::to_string(b.upper) + ")";
        }
        ++low_above;
      }
    }
    std::string detail = "200 formulas; simplex_lower > min_components in " +
                         std::to_string(low_above) + "; min_components > upper in " +
                         std::to_string(cover_above);
    if (!example.empty()) detail += "; e.g. " + example;
    return Outcome{low_above == 0 && cover_above == 0, detail};
  });

  Check("property: mixture path k=2 stays possible", [] {
    const Formula f = parse("!r | !g");
    const TruthTable table(f);
    const MixtureParams m1({0.3, 0.7}, {IndependentParams({0.0, 0.8}), IndependentParams({0.0, 0.1})});
    const MixtureParams m2({0.6, 0.4}, {IndependentParams({0.9, 0.0}), IndependentParams({0.2, 0.0})});
    const auto path = mixture_path(f, m1, m2, 100);
    int possible = 0;
    for (const auto& m : path) possible += std::abs(wmc(table, densify(m)) - 1.0) <= 1e-12;
    return Outcome{possible == static_cast<int>(path.size()) && path.size() == 100,
                   std::to_string(possible) + "/" + std::to_string(path.size()) +
                       " waypoints with WMC 1"};
  });

  Info("property suites wall time", Fmt("%.2f s (limit 60 s)", SecondsSince(start)));
}

// ---- experiments ----------------------------------------------------------

void ExperimentCriteria() {
  const Formula f = parse("!r | !g");
  RunConfig cfg;
  cfg.lr = 0.1;
  cfg.iters = 10000;
  cfg.num_runs = 256;
  cfg.seed = 7;

  const auto start = Clock::now();
  const auto report =
      experiment(f, {ModelSpec::Independent(2), ModelSpec::Expressive(2)}, cfg);
  const double secs = SecondsSince(start);
  const auto& ind = report.models[0].summary;
  const auto& exp = report.models[1].summary;

  Check("experiment: independent endpoints within 1e-3", [&] {
    const int edge_r = ind.facet_counts.count("0*") ? ind.facet_counts.at("0*") : 0;
    const int edge_g = ind.facet_counts.count("*0") ? ind.facet_counts.at("*0") : 0;
    double sum = 0.0, worst = 0.0;
    for (const auto& m : report.models[0].minima) {
      sum += *m.distance;
      worst = std::max(worst, *m.distance);
    }
    const bool both = edge_r > 0 && edge_g > 0;
    return Outcome{ind.fraction_possible >= 0.95 && both && ind.failures == 0 && secs <= 300,
                   Fmt("%.2f%% within 1e-3 (need 95%%); mean distance %.2e, max %.2e", 100 * ind.fraction_possible,
                       sum / 256, worst) +
                       "; nearest facets 0*:" + std::to_string(edge_r) +
                       " *0:" + std::to_string(edge_g)};
  });
  Check("experiment: expressive endpoints p(r,g) < 1e-3", [&] {
    return Outcome{exp.fraction_impossible_below == 1.0 && exp.failures == 0 && secs <= 300,
                   Fmt("%.2f%% below 1e-3; mean p(r,g) %.2e", 100 * exp.fraction_impossible_below,
                       exp.mean_impossible_mass)};
  });
  Info("experiment: independent mass p(r,g) < 1e-3",
       Fmt("%.2f%% of runs", 100 * ind.fraction_impossible_below));
  Info("experiment: expressive near-vertex fraction", Fmt("%.4f (threshold 0.15)", exp.near_vertex_fraction));
  Info("experiment: wall time", Fmt("%.2f s for 512 runs (limit 300 s)", secs));

  Check("entropy regularized: p(r,g) = 0.023 +- 0.01", [&] {
    RunConfig c = cfg;
    c.loss = LossSpec::SemanticEntropy(0.1, EntropyVariant::kCrossEntropy);
    const auto r = experiment(f, {ModelSpec::Independent(2)}, c);
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (const auto& m : r.models[0].minima) {
      lo = std::min(lo, m.impossible_mass);
      hi = std::max(hi, m.impossible_mass);
      sum += m.impossible_mass;
    }
    const double mean = sum / c.num_runs;
    const bool ok = r.models[0].summary.failures == 0 && std::abs(mean - 0.023) <= 0.01 &&
                    lo >= 0.013 && hi <= 0.033;
    return Outcome{ok, Fmt("mean %.5f, range [%.5f, %.5f] over 256 runs", mean, lo, hi)};
  });
  {
    RunConfig c = cfg;
    c.loss = LossSpec::SemanticEntropy(0.01);
    const auto r = experiment(f, {ModelSpec::Expressive(2)}, c);
    Info("entropy regularized: expressive alpha 0.01",
         Fmt("near-vertex fraction %.4f vs %.4f unregularized", r.models[0].summary.near_vertex_fraction,
             exp.near_vertex_fraction));
  }
}

// ---- fuzzy landscapes -----------------------------------------------------

void LandscapeCriteria() {
  const Formula f = parse("!r | !g");
  Check("landscape: product neg_log equals semantic loss", [&] {
    cli::LandscapeOptions sem, prod;
    prod.loss = LossSpec::Fuzzy(FuzzyLogic::kProduct, FuzzyForm::kNegLog);
    const auto a = cli::landscape_grid(f, sem);
    const auto b = cli::landscape_grid(f, prod);
    double worst = 0.0;
    int infinite = 0;
    bool ok = a.size() == b.size() && a.size() == 201u * 201u;
    for (std::size_t i = 0; ok && i < a.size(); ++i) {
      if (std::isinf(a[i].loss)) {
        // Semantic loss is infinite where the fuzzy value is clamped.
        ++infinite;
        ok = std::abs(b[i].loss + std::log(kFuzzyClamp)) <= 1e-12;
        continue;
      }
      worst = std::max(worst, std::abs(a[i].loss - b[i].loss));
    }
    ok = ok && worst <= 1e-12;
    return Outcome{ok, "201x201 grid, max difference " + Fmt("%.3g", worst) + "; " +
                           std::to_string(infinite) + " point(s) with infinite semantic loss"};
  });
  Check("landscape: Lukasiewicz zero set is r + g <= 1", [&] {
    cli::LandscapeOptions luk;
    luk.loss = LossSpec::Fuzzy(FuzzyLogic::kLukasiewicz, FuzzyForm::kOneMinus);
    const auto grid = cli::landscape_grid(f, luk);
    // 1 - mu rounds, so points with r + g = 1 can carry an ulp of loss.
    int mismatches = 0, zeros = 0, zeros_above_half = 0, residues = 0;
    for (const auto& p : grid) {
      const bool zero = std::abs(p.loss) <= 1e-15;
      zeros += zero;
      residues += zero && p.loss != 0.0;
      if (zero != (p.i + p.j <= 200)) ++mismatches;
      if (zero && p.i + p.j > 100) ++zeros_above_half;
    }
    return Outcome{mismatches == 0,
                   std::to_string(zeros) + " zero points (" + std::to_string(residues) +
                       " at rounding level), " + std::to_string(mismatches) + " mismatches; " + std::to_string(zeros_above_half) +
                       " zeros have r + g > 0.5, so a 0.5 threshold does not describe the set"};
  });
}

}  // namespace
}  // namespace losscape

int main() {
  const auto start = losscape::Clock::now();
  losscape::GoldenCriteria();
  losscape::PropertyCriteria();
  losscape::ExperimentCriteria();
  losscape::LandscapeCriteria();
  std::printf("%d criteria failed, %.1f s\n", losscape::g_failures,
              losscape::SecondsSince(start));
  return losscape::g_failures == 0 ? 0 : 1;
}
