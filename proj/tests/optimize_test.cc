#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "losscape/cli/builtins.h"
#include "losscape/optimize.h"

namespace losscape {
namespace {

double Logit(double p) { return std::log(p / (1 - p)); }

const Formula& Traffic() {
  static const Formula f = parse("!r | !g");
  return f;
}

RunConfig Config(int iters, int runs = 8) {
  RunConfig cfg;
  cfg.iters = iters;
  cfg.num_runs = runs;
  cfg.threads = 1;
  return cfg;
}

TEST(ModelSpec, Layouts) {
  EXPECT_EQ(ModelSpec::Independent(2).num_params(), 2u);
  EXPECT_EQ(ModelSpec::Expressive(3).num_params(), 8u);
  EXPECT_EQ(ModelSpec::Mixture(3, 2).num_params(), 2u + 6u);
  EXPECT_EQ(parse_model("mixture:3", 2).name(), "mixture3");
  EXPECT_EQ(parse_model("mixture", 2).k, 2);
  EXPECT_EQ(parse_model("expressive", 2).kind, ModelKind::kExpressiveSoftmax);
  EXPECT_THROW(parse_model("mixture:0", 2), InvalidArgument);
  EXPECT_THROW(parse_model("lstm", 2), InvalidArgument);
}

TEST(Initialize, IndependentHitsImpossibleMass) {
  std::mt19937_64 rng(61);
  const auto model = ModelSpec::Independent(2);
  for (int c = 0; c < 200; ++c) {
    const auto params = initialize(model, InitSpec{}, rng);
    const auto dense = model_distribution(model, params);
    EXPECT_NEAR(dense[3], 0.7, 1e-9);
    const auto mu = model_mu(model, params);
    EXPECT_GE(mu.mu[0], 0.7 - 1e-12);
  }
}

TEST(Initialize, ExpressiveHitsImpossibleMassExactly) {
  std::mt19937_64 rng(62);
  const auto model = ModelSpec::Expressive(2);
  for (int c = 0; c < 200; ++c) {
    const auto dense = model_distribution(model, initialize(model, InitSpec{}, rng));
    EXPECT_NEAR(dense[3], 0.7, 1e-15);
    EXPECT_NEAR(dense[0] + dense[1] + dense[2], 0.3, 1e-15);
  }
}

TEST(Initialize, MixtureComponentsEachHitMass) {
  std::mt19937_64 rng(63);
  const auto model = ModelSpec::Mixture(2, 3);
  const auto params = initialize(model, InitSpec{}, rng);
  EXPECT_NEAR(model_distribution(model, params)[3], 0.7, 1e-9);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(params[c], 0.0);
}

TEST(Initialize, Infeasible) {
  std::mt19937_64 rng(64);
  InitSpec init;
  init.impossible_mass = 1.0;
  EXPECT_THROW(initialize(ModelSpec::Independent(2), init, rng), InfeasibleInit);
  EXPECT_THROW(initialize(ModelSpec::Expressive(2), init, rng), InfeasibleInit);
  init.impossible_mass = 0.0;
  EXPECT_THROW(initialize(ModelSpec::Independent(2), init, rng), InfeasibleInit);
}

TEST(Seeds, DistinctPerRunAndStable) {
  EXPECT_EQ(run_seed(7, 3), run_seed(7, 3));
  EXPECT_NE(run_seed(7, 3), run_seed(7, 4));
  EXPECT_NE(run_seed(7, 3), run_seed(8, 3));
  auto a = run_rng(7, 3), b = run_rng(7, 3);
  EXPECT_EQ(a(), b());
}

TEST(GradientDescent, ZeroIterationsReturnsInit) {
  const auto model = ModelSpec::Independent(2);
  const std::vector<double> params = {Logit(0.8), Logit(0.875)};
  const auto r = gd_minimize(model, params, Traffic(), Config(0));
  EXPECT_EQ(r.final_params, params);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.final_loss, r.init_loss);
  EXPECT_EQ(r.final_dense.probs, r.init_dense.probs);
}

TEST(GradientDescent, LossNeverRisesBeyondSlack) {
  std::mt19937_64 rng(65);
  for (const auto& model : {ModelSpec::Independent(2), ModelSpec::Expressive(2),
                            ModelSpec::Mixture(2, 2)}) {
    for (const auto& loss : {LossSpec::Semantic(), LossSpec::SemanticEntropy(0.2)}) {
      auto cfg = Config(100);
      cfg.loss = loss;
      cfg.lr = 2.0;  // large enough to exercise the guard
      cfg.capture_trajectory = true;
      const auto r = gd_minimize(model, initialize(model, cfg.init, rng), Traffic(), cfg);
      ASSERT_EQ(r.trajectory.size(), 101u);
      for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
        ASSERT_LE(r.trajectory[i].loss, r.trajectory[i - 1].loss + 1e-9) << model.name();
      }
      EXPECT_LT(r.final_loss, r.init_loss);
    }
  }
}

TEST(GradientDescent, RejectsNonFiniteStart) {
  const auto model = ModelSpec::Expressive(2);
  const std::vector<double> params = {-1e4, -1e4, -1e4, 0.0};
  EXPECT_THROW(gd_minimize(model, params, Traffic(), Config(5)), InvalidArgument);
}

TEST(ModelGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> normal(0.0, 1.5);
  const Formula hole = cli::builtin_formula("hole");
  const TruthTable traffic_table(Traffic()), hole_table(hole);
  int points = 0;
  for (int c = 0; c < 50; ++c) {
    for (const Formula* formula : {&Traffic(), &hole}) {
      const Formula& f = *formula;
      const TruthTable& table = formula == &hole ? hole_table : traffic_table;
      for (const auto& model : {ModelSpec::Expressive(f.n()), ModelSpec::Independent(f.n()),
                                ModelSpec::Mixture(f.n(), 2)}) {
        std::vector<double> params(model.num_params());
        for (double& x : params) x = normal(rng);
        for (const auto& loss : {LossSpec::Semantic(), LossSpec::SemanticEntropy(0.3),
                                 LossSpec::SemanticEntropy(0.5, EntropyVariant::kPaperLiteral)}) {
          const auto analytic = model_grad(model, params, table, f, loss);
          double diff = 0.0, scale = 1e-3;
          for (std::size_t i = 0; i < params.size(); ++i) {
            auto up = params, down = params;
            up[i] += 1e-6;
            down[i] -= 1e-6;
            const double fd =
                (model_loss(model, up, table, f, loss) - model_loss(model, down, table, f, loss)) /
                2e-6;
            diff = std::max(diff, std::abs(fd - analytic[i]));
            scale = std::max(scale, std::abs(fd));
          }
          ASSERT_LT(diff / scale, 1e-5) << model.name() << " " << loss.name();
        }
      }
      ++points;
    }
  }
  EXPECT_EQ(points, 100);
}

TEST(ModelGrad, FuzzyIndependentOnly) {
  const auto loss = LossSpec::Fuzzy(FuzzyLogic::kProduct, FuzzyForm::kOneMinus);
  const TruthTable table(Traffic());
  const std::vector<double> params = {0.3, -0.2};
  const auto g = model_grad(ModelSpec::Independent(2), params, table, Traffic(), loss);
  // 1 - (1 - r g): d/dtheta_r = g * r (1 - r).
  const double r = 1 / (1 + std::exp(-0.3)), gg = 1 / (1 + std::exp(0.2));
  EXPECT_NEAR(g[0], gg * r * (1 - r), 1e-12);
  EXPECT_THROW(model_loss(ModelSpec::Expressive(2), {0, 0, 0, 0}, table, Traffic(), loss),
               InvalidArgument);
}

TEST(Classify, IndependentEndpoint) {
  const auto model = ModelSpec::Independent(2);
  RunResult r;
  r.final_params = {Logit(0.0003), Logit(0.41)};
  r.final_dense = model_distribution(model, r.final_params);
  const auto m = classify_minimum(Traffic(), model, r);
  EXPECT_EQ(*m.facet, "0*");
  EXPECT_EQ(*m.deterministic, "0-");
  EXPECT_NEAR(*m.distance, 0.0003, 1e-12);
  EXPECT_NEAR(m.impossible_mass, 0.0003 * 0.41, 1e-12);
}

TEST(Classify, OriginTieGoesToFirstFacet) {
  const auto model = ModelSpec::Independent(2);
  RunResult r;
  r.final_params = {-800.0, -800.0};
  r.final_dense = model_distribution(model, r.final_params);
  const auto m = classify_minimum(Traffic(), model, r);
  EXPECT_EQ(*m.facet, "0*");
  EXPECT_EQ(*m.distance, 0.0);
  EXPECT_EQ(*m.deterministic, "00");
}

TEST(Classify, ExpressiveNearVertex) {
  const auto model = ModelSpec::Expressive(2);
  RunResult r;
  r.final_params = {std::log(0.05), std::log(0.02), std::log(0.93), std::log(1e-5)};
  r.final_dense = model_distribution(model, r.final_params);
  const auto m = classify_minimum(Traffic(), model, r);
  EXPECT_EQ(m.nearest_vertex, World{2});
  EXPECT_TRUE(m.near_vertex);
  EXPECT_LT(m.vertex_distance, 0.15);
  EXPECT_FALSE(m.facet.has_value());
}

TEST(Experiment, DeterministicCsv) {
  auto cfg = Config(300, 6);
  cfg.capture_trajectory = true;
  const std::vector<ModelSpec> models = {ModelSpec::Independent(2), ModelSpec::Expressive(2)};
  auto render = [&](int threads) {
    auto c = cfg;
    c.threads = threads;
    const auto report = experiment(Traffic(), models, c);
    std::ostringstream a, b;
    write_endpoints_csv(a, Traffic(), report);
    write_trajectories_csv(b, Traffic(), report);
    return a.str() + b.str();
  };
  const auto first = render(1);
  EXPECT_EQ(first, render(1));
  EXPECT_EQ(first, render(3));
  EXPECT_EQ(first.rfind("run_id,model,loss_kind,alpha,seed,final_loss,dist_Cphi,nearest_facet,p_", 0),
            0u);
}

TEST(Experiment, ExpressiveSemanticReachesPossibleSet) {
  const auto report = experiment(Traffic(), {ModelSpec::Expressive(2)}, Config(10000, 32));
  for (std::size_t i = 0; i < report.models[0].runs.size(); ++i) {
    EXPECT_LT(report.models[0].minima[i].impossible_mass, 1e-3);
  }
  EXPECT_EQ(report.models[0].summary.fraction_possible, 1.0);
}

TEST(Experiment, IndependentEndpointsAreImplicants) {
  // Near a facet the distance decays like 1 / (lr * mu_free * t), so only
  // part of the runs reach 1e-3 even after 100k steps.
  const auto report = experiment(Traffic(), {ModelSpec::Independent(2)}, Config(100000, 16));
  const auto& mr = report.models[0];
  int converged = 0;
  for (std::size_t i = 0; i < mr.runs.size(); ++i) {
    ASSERT_TRUE(mr.runs[i].failure.empty());
    if (*mr.minima[i].distance >= kPossibleDistance) continue;
    ++converged;
    const auto mu = model_mu(mr.model, mr.runs[i].final_params);
    EXPECT_TRUE(is_implicant(Traffic(), deterministic_assignment(mu, 1e-3)));
  }
  EXPECT_GE(converged, 4);
}

TEST(Experiment, RunIdsAreGlobal) {
  const auto report =
      experiment(Traffic(), {ModelSpec::Independent(2), ModelSpec::Expressive(2)}, Config(1, 3));
  EXPECT_EQ(report.models[1].runs[0].run_id, 3);
  EXPECT_EQ(report.models[1].runs[0].seed, run_seed(7, 3));
  EXPECT_THROW(experiment(Traffic(), {ModelSpec::Independent(3)}, Config(1, 1)), InvalidArgument);
}

}  // namespace
}  // namespace losscape
