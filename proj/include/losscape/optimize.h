#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "losscape/distributions.h"
#include "losscape/losses.h"

namespace losscape {

enum class ModelKind { kIndependentSigmoid, kExpressiveSoftmax, kMixture };

// Parameter layouts:
//   independent: theta_i, mu_i = sigmoid(theta_i)            (n reals)
//   expressive:  logits z_w, p = softmax(z)                   (2^n reals)
//   mixture:     logits a_c, then theta_{c,i} row by row      (k + k*n reals)
struct ModelSpec {
  ModelKind kind = ModelKind::kIndependentSigmoid;
  int n = 0;
  int k = 1;  // mixture only

  static ModelSpec Independent(int n);
  static ModelSpec Expressive(int n);
  static ModelSpec Mixture(int n, int k);

  std::size_t num_params() const;
  // "independent", "expressive" or "mixture<k>".
  std::string name() const;
  void validate() const;
};

// Parses "independent", "expressive", "mixture" (k = 2) or "mixture:K".
ModelSpec parse_model(const std::string& text, int n);

struct InitSpec {
  // Initial probability of `impossible_world`.
  double impossible_mass = 0.7;
  // Defaults to the all-true world.
  std::optional<World> impossible_world;
  // Dirichlet concentration for the expressive model's remaining mass.
  double concentration = 1.0;

  World world(int n) const;
};

struct RunConfig {
  LossSpec loss;
  double lr = 0.1;
  int iters = 10000;
  int num_runs = 256;
  std::uint64_t seed = 7;
  InitSpec init;
  bool capture_trajectory = false;
  int threads = 0;  // 0 picks the hardware concurrency

  void validate() const;
};

struct Snapshot {
  int step = 0;
  double loss = 0.0;
  std::vector<double> probs;
};

struct RunResult {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::vector<double> init_params;
  std::vector<double> final_params;
  DenseDistribution init_dense;
  DenseDistribution final_dense;
  double init_loss = 0.0;
  double final_loss = 0.0;
  int steps = 0;             // accepted steps
  int halvings = 0;          // step-size halvings by the guard
  bool stalled = false;      // no acceptable step even after halving
  bool diverged = false;     // DivergedToInfiniteLoss
  std::string failure;       // non-empty when the run aborted
  std::optional<double> distance_to_cphi;   // independent models
  std::optional<std::size_t> nearest_facet;
  std::vector<Snapshot> trajectory;
};

// Per-run RNG derived from the master seed and the run index.
std::mt19937_64 run_rng(std::uint64_t seed, std::uint64_t run_index);
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index);

std::vector<double> initialize(const ModelSpec& model, const InitSpec& init,
                               std::mt19937_64& rng);

DenseDistribution model_distribution(const ModelSpec& model,
                                     const std::vector<double>& params);
// Independent mu of an independent model, or of one mixture component.
IndependentParams model_mu(const ModelSpec& model,
                           const std::vector<double>& params, int component = 0);

double model_loss(const ModelSpec& model, const std::vector<double>& params,
                  const TruthTable& table, const Formula& f,
                  const LossSpec& loss);
std::vector<double> model_grad(const ModelSpec& model,
                               const std::vector<double>& params,
                               const TruthTable& table, const Formula& f,
                               const LossSpec& loss);

// Plain fixed-step gradient descent. A step is accepted when the new loss is
// finite and at most 1e-9 above the current one; otherwise the step is halved
// up to 20 times.
RunResult gd_minimize(const ModelSpec& model, std::vector<double> params0,
                      const Formula& f, const RunConfig& cfg);

inline constexpr double kPossibleDistance = 1e-3;
inline constexpr double kNearVertex = 0.15;

struct MinimumReport {
  // Independent models.
  std::optional<std::string> facet;
  std::optional<double> distance;
  std::optional<std::string> deterministic;  // eps 1e-3
  // Every model.
  double impossible_mass = 0.0;
  World nearest_vertex;
  double vertex_distance = 0.0;  // half the L1 distance on the simplex
  bool near_vertex = false;
};

MinimumReport classify_minimum(const Formula& f, const ModelSpec& model,
                               const RunResult& r);

struct ModelSummary {
  ModelSpec model;
  int runs = 0;
  int failures = 0;
  double fraction_possible = 0.0;  // independent: distance < 1e-3
  double fraction_impossible_below = 0.0;  // impossible mass < 1e-3
  double near_vertex_fraction = 0.0;
  double mean_impossible_mass = 0.0;
  std::map<std::string, int> facet_counts;
};

struct ModelRuns {
  ModelSpec model;
  std::vector<RunResult> runs;
  std::vector<MinimumReport> minima;
  ModelSummary summary;
};

struct ExperimentReport {
  std::string formula;
  std::vector<std::string> vars;
  RunConfig config;
  std::vector<ModelRuns> models;
};

ExperimentReport experiment(const Formula& f,
                            const std::vector<ModelSpec>& models,
                            const RunConfig& cfg);

void write_endpoints_csv(std::ostream& out, const Formula& f,
                         const ExperimentReport& report);
void write_trajectories_csv(std::ostream& out, const Formula& f,
                            const ExperimentReport& report);

}  // namespace losscape
