#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "losscape/optimize.h"

namespace losscape {
namespace {

// Runs fn(i) for i in [0, count) on a small worker pool. Each index is
// claimed exactly once, so results are independent of scheduling.
template <typename Fn>
void ParallelFor(std::size_t count, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

ModelSummary Summarize(const ModelSpec& model, const std::vector<RunResult>& runs,
                       const std::vector<MinimumReport>& minima) {
  ModelSummary s;
  s.model = model;
  s.runs = static_cast<int>(runs.size());
  int possible = 0, below = 0, near = 0;
  double mass = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunResult& r = runs[i];
    const MinimumReport& m = minima[i];
    if (!r.failure.empty()) {
      ++s.failures;
      continue;
    }
    if (m.impossible_mass < kPossibleDistance) ++below;
    if (m.near_vertex) ++near;
    mass += m.impossible_mass;
    if (model.kind == ModelKind::kIndependentSigmoid) {
      if (*m.distance < kPossibleDistance) ++possible;
      ++s.facet_counts[*m.facet];
    } else {
      if (m.impossible_mass < kPossibleDistance) ++possible;
      ++s.facet_counts["vertex:" + std::to_string(m.nearest_vertex.bits)];
    }
  }
  const double total = runs.empty() ? 1.0 : static_cast<double>(runs.size());
  s.fraction_possible = possible / total;
  s.fraction_impossible_below = below / total;
  s.near_vertex_fraction = near / total;
  const int ok = s.runs - s.failures;
  s.mean_impossible_mass = ok > 0 ? mass / ok : 0.0;
  return s;
}

}  // namespace

ExperimentReport experiment(const Formula& f,
                            const std::vector<ModelSpec>& models,
                            const RunConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.formula = f.to_string();
  report.vars = f.vars();
  report.config = cfg;

  int next_id = 0;
  for (const ModelSpec& model : models) {
    if (model.n != f.n()) throw InvalidArgument("model and formula differ in n");
    model.validate();
    ModelRuns mr;
    mr.model = model;
    const auto count = static_cast<std::size_t>(cfg.num_runs);
    mr.runs.resize(count);
    mr.minima.resize(count);
    const int base = next_id;
    ParallelFor(count, cfg.threads, [&](std::size_t i) {
      const int id = base + static_cast<int>(i);
      const std::uint64_t seed = run_seed(cfg.seed, static_cast<std::uint64_t>(id));
      RunResult& r = mr.runs[i];
      try {
        std::mt19937_64 rng(seed);
        r = gd_minimize(model, initialize(model, cfg.init, rng), f, cfg);
        mr.minima[i] = classify_minimum(f, model, r);
      } catch (const std::exception& e) {
        r = RunResult{};
        r.failure = e.what();
      }
      r.run_id = id;
      r.seed = seed;
    });
    next_id += cfg.num_runs;
    mr.summary = Summarize(model, mr.runs, mr.minima);
    report.models.push_back(std::move(mr));
  }
  return report;
}

}  // namespace losscape
