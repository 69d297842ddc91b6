#include "losscape/optimize.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "losscape/cubical.h"

namespace losscape {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAcceptSlack = 1e-9;
constexpr int kMaxHalvings = 20;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double Logit(double p) {
  p = std::clamp(p, 1e-15, 1.0 - 1e-15);
  return std::log(p) - std::log1p(-p);
}

std::vector<double> Softmax(std::span<const double> z) {
  const double hi = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) total += p[i] = std::exp(z[i] - hi);
  for (double& x : p) x /= total;
  return p;
}

IndependentParams SigmoidParams(std::span<const double> theta) {
  IndependentParams mu;
  mu.mu.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) mu.mu[i] = Sigmoid(theta[i]);
  return mu;
}

// d/dmu_i of sum_w g(w) p_mu(w), by pinning mu_i to 1 and to 0.
std::vector<double> ChainIndependent(const IndependentParams& mu,
                                     const std::vector<double>& g) {
  std::vector<double> out(mu.mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.mu.size(); ++i) {
    IndependentParams pinned = mu;
    pinned.mu[i] = 1.0;
    const DenseDistribution hi = densify(pinned);
    pinned.mu[i] = 0.0;
    const DenseDistribution lo = densify(pinned);
    double acc = 0.0;
    for (std::size_t w = 0; w < g.size(); ++w) {
      if (g[w] != 0.0) acc += g[w] * (hi.probs[w] - lo.probs[w]);
    }
    out[i] = acc;
  }
  return out;
}

double Dot(const std::vector<double>& g, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t w = 0; w < g.size(); ++w) {
    if (g[w] != 0.0 && p[w] != 0.0) acc += g[w] * p[w];
  }
  return acc;
}

void RequireDense(const ModelSpec& model, const LossSpec& loss) {
  if (loss.kind == LossKind::kFuzzy &&
      model.kind != ModelKind::kIndependentSigmoid) {
    throw InvalidArgument("fuzzy losses need the independent model");
  }
}

std::string FormatDouble(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ModelSpec ModelSpec::Independent(int n) {
  return {ModelKind::kIndependentSigmoid, n, 1};
}

ModelSpec ModelSpec::Expressive(int n) {
  return {ModelKind::kExpressiveSoftmax, n, 1};
}

ModelSpec ModelSpec::Mixture(int n, int k) { return {ModelKind::kMixture, n, k}; }

std::size_t ModelSpec::num_params() const {
  const auto nn = static_cast<std::size_t>(n);
  switch (kind) {
    case ModelKind::kIndependentSigmoid: return nn;
    case ModelKind::kExpressiveSoftmax: return std::size_t{1} << n;
    case ModelKind::kMixture:
      return static_cast<std::size_t>(k) * (nn + 1);
  }
  return 0;
}

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::kIndependentSigmoid: return "independent";
    case ModelKind::kExpressiveSoftmax: return "expressive";
    case ModelKind::kMixture: return "mixture" + std::to_string(k);
  }
  return "unknown";
}

void ModelSpec::validate() const {
  if (n < 1) throw InvalidArgument("model needs n >= 1");
  check_enumerable(n, Limits::FromEnv());
  if (kind == ModelKind::kMixture && k < 1) {
    throw InvalidArgument("mixture needs k >= 1");
  }
}

ModelSpec parse_model(const std::string& text, int n) {
  if (text == "independent") return ModelSpec::Independent(n);
  if (text == "expressive") return ModelSpec::Expressive(n);
  if (text == "mixture") return ModelSpec::Mixture(n, 2);
  if (text.rfind("mixture:", 0) == 0) {
    const std::string k = text.substr(8);
    if (k.empty() || k.size() > 4 ||
        !std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw InvalidArgument("bad mixture size in '" + text + "'");
    }
    const ModelSpec spec = ModelSpec::Mixture(n, std::stoi(k));
    spec.validate();
    return spec;
  }
  throw InvalidArgument("unknown model '" + text + "'");
}

World InitSpec::world(int n) const {
  if (impossible_world) return *impossible_world;
  return World{n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
}

void RunConfig::validate() const {
  loss.validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("lr must be > 0");
  if (iters < 0) throw InvalidArgument("iters must be >= 0");
  if (num_runs < 1) throw InvalidArgument("runs must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index) {
  return SplitMix64(SplitMix64(seed) ^ run_index);
}

std::mt19937_64 run_rng(std::uint64_t seed, std::uint64_t run_index) {
  return std::mt19937_64(run_seed(seed, run_index));
}

std::vector<double> initialize(const ModelSpec& model, const InitSpec& init,
                               std::mt19937_64& rng) {
  model.validate();
  const double mass = init.impossible_mass;
  if (!(mass > 0.0 && mass < 1.0)) {
    throw InfeasibleInit("impossible mass must lie strictly between 0 and 1");
  }
  const World target = init.world(model.n);
  if (target.bits >> model.n) throw InfeasibleInit("target world out of range");

  // Factors q_i with prod q_i = mass; q_i is the probability that variable i
  // takes its value in the target world.
  auto independent = [&]() {
    std::vector<double> theta(static_cast<std::size_t>(model.n));
    double remaining = mass;
    for (int i = 0; i < model.n; ++i) {
      double q = remaining;
      if (i + 1 < model.n) {
        q = std::uniform_real_distribution<double>(remaining, 1.0)(rng);
        remaining /= q;
      }
      const double mu = target.value(i) ? q : 1.0 - q;
      theta[static_cast<std::size_t>(i)] = Logit(mu);
    }
    return theta;
  };

  switch (model.kind) {
    case ModelKind::kIndependentSigmoid: return independent();
    case ModelKind::kExpressiveSoftmax: {
      const std::size_t worlds = std::size_t{1} << model.n;
      if (worlds < 2) throw InfeasibleInit("no remaining worlds");
      std::gamma_distribution<double> gamma(init.concentration, 1.0);
      std::vector<double> probs(worlds, 0.0);
      double total = 0.0;
      for (std::size_t w = 0; w < worlds; ++w) {
        if (w == target.bits) continue;
        double g = 0.0;
        while (!(g > 0.0)) g = gamma(rng);
        total += probs[w] = g;
      }
      std::vector<double> logits(worlds);
      for (std::size_t w = 0; w < worlds; ++w) {
        const double p = w == target.bits ? mass : (1.0 - mass) * probs[w] / total;
        logits[w] = std::log(p);
      }
      return logits;
    }
    case ModelKind::kMixture: {
      std::vector<double> params(static_cast<std::size_t>(model.k), 0.0);
      for (int c = 0; c < model.k; ++c) {
        const auto theta = independent();
        params.insert(params.end(), theta.begin(), theta.end());
      }
      return params;
    }
  }
  throw InternalError("unknown model");
}

IndependentParams model_mu(const ModelSpec& model,
                           const std::vector<double>& params, int component) {
  const auto n = static_cast<std::size_t>(model.n);
  switch (model.kind) {
    case ModelKind::kIndependentSigmoid: return SigmoidParams(params);
    case ModelKind::kMixture: {
      const std::size_t off = static_cast<std::size_t>(model.k) +
                              static_cast<std::size_t>(component) * n;
      return SigmoidParams(std::span<const double>(params).subspan(off, n));
    }
    case ModelKind::kExpressiveSoftmax: break;
  }
  throw InvalidArgument("the expressive model has no independent parameters");
}

DenseDistribution model_distribution(const ModelSpec& model,
                                     const std::vector<double>& params) {
  if (params.size() != model.num_params()) {
    throw InvalidArgument("parameter count does not match the model");
  }
  switch (model.kind) {
    case ModelKind::kIndependentSigmoid: return densify(model_mu(model, params));
    case ModelKind::kExpressiveSoftmax: {
      DenseDistribution d;
      d.probs = Softmax(params);
      return d;
    }
    case ModelKind::kMixture: {
      const auto alpha = Softmax(std::span<const double>(params).first(
          static_cast<std::size_t>(model.k)));
      DenseDistribution d;
      d.probs.assign(std::size_t{1} << model.n, 0.0);
      for (int c = 0; c < model.k; ++c) {
        const auto part = densify(model_mu(model, params, c));
        for (std::size_t w = 0; w < d.probs.size(); ++w) {
          d.probs[w] += alpha[static_cast<std::size_t>(c)] * part.probs[w];
        }
      }
      return d;
    }
  }
  throw InternalError("unknown model");
}

double model_loss(const ModelSpec& model, const std::vector<double>& params,
                  const TruthTable& table, const Formula& f,
                  const LossSpec& loss) {
  RequireDense(model, loss);
  if (loss.kind == LossKind::kFuzzy) {
    return fuzzy_loss(f, model_mu(model, params), loss.logic, loss.form);
  }
  return dense_loss(table, model_distribution(model, params), loss);
}

std::vector<double> model_grad(const ModelSpec& model,
                               const std::vector<double>& params,
                               const TruthTable& table, const Formula& f,
                               const LossSpec& loss) {
  RequireDense(model, loss);
  std::vector<double> grad(params.size(), 0.0);
  const auto n = static_cast<std::size_t>(model.n);

  if (loss.kind == LossKind::kFuzzy) {
    const IndependentParams mu = model_mu(model, params);
    const auto g = fuzzy_grad_mu(f, mu, loss.logic, loss.form);
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = g[i] * mu.mu[i] * (1.0 - mu.mu[i]);
    }
    return grad;
  }

  const DenseDistribution p = model_distribution(model, params);
  const std::vector<double> g = dense_loss_grad(table, p, loss).grad;
  switch (model.kind) {
    case ModelKind::kIndependentSigmoid: {
      const IndependentParams mu = model_mu(model, params);
      const auto dmu = ChainIndependent(mu, g);
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] = dmu[i] * mu.mu[i] * (1.0 - mu.mu[i]);
      }
      break;
    }
    case ModelKind::kExpressiveSoftmax: {
      const double mean = Dot(g, p.probs);
      for (std::size_t w = 0; w < grad.size(); ++w) {
        const double pg = (g[w] != 0.0 && p.probs[w] != 0.0) ? p.probs[w] * g[w] : 0.0;
        grad[w] = pg - p.probs[w] * mean;
      }
      break;
    }
    case ModelKind::kMixture: {
      const auto k = static_cast<std::size_t>(model.k);
      const auto alpha = Softmax(std::span<const double>(params).first(k));
      std::vector<double> g_comp(k);
      for (std::size_t c = 0; c < k; ++c) {
        const IndependentParams mu = model_mu(model, params, static_cast<int>(c));
        g_comp[c] = Dot(g, densify(mu).probs);
        const auto dmu = ChainIndependent(mu, g);
        for (std::size_t i = 0; i < n; ++i) {
          grad[k + c * n + i] = alpha[c] * dmu[i] * mu.mu[i] * (1.0 - mu.mu[i]);
        }
      }
      double mean = 0.0;
      for (std::size_t c = 0; c < k; ++c) mean += alpha[c] * g_comp[c];
      for (std::size_t c = 0; c < k; ++c) grad[c] = alpha[c] * (g_comp[c] - mean);
      break;
    }
  }
  return grad;
}

RunResult gd_minimize(const ModelSpec& model, std::vector<double> params0,
                      const Formula& f, const RunConfig& cfg) {
  cfg.validate();
  model.validate();
  if (model.n != f.n()) throw InvalidArgument("model and formula differ in n");
  const TruthTable table(f, Limits::FromEnv());

  RunResult r;
  r.init_params = params0;
  r.init_dense = model_distribution(model, params0);
  std::vector<double> params = std::move(params0);
  double loss = model_loss(model, params, table, f, cfg.loss);
  if (!std::isfinite(loss)) {
    throw InvalidArgument("loss is not finite at the initial parameters");
  }
  r.init_loss = loss;

  const int every = std::max(1, cfg.iters / 100);
  auto snapshot = [&](int step) {
    if (cfg.capture_trajectory) {
      r.trajectory.push_back({step, loss, model_distribution(model, params).probs});
    }
  };
  snapshot(0);

  std::vector<double> trial(params.size());
  for (int t = 1; t <= cfg.iters; ++t) {
    const auto grad = model_grad(model, params, table, f, cfg.loss);
    double step = cfg.lr;
    double trial_loss = kInf;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        trial[i] = params[i] - step * grad[i];
      }
      trial_loss = model_loss(model, trial, table, f, cfg.loss);
      if (std::isfinite(trial_loss) && trial_loss <= loss + kAcceptSlack) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++r.halvings;
    }
    if (!accepted) {
      if (std::isfinite(trial_loss)) {
        r.stalled = true;
      } else {
        r.diverged = true;
        r.failure = "DivergedToInfiniteLoss";
      }
      snapshot(t);
      break;
    }
    params.swap(trial);
    loss = trial_loss;
    ++r.steps;
    if (t % every == 0 || t == cfg.iters) snapshot(t);
  }

  r.final_params = std::move(params);
  r.final_dense = model_distribution(model, r.final_params);
  r.final_loss = loss;
  if (model.kind == ModelKind::kIndependentSigmoid) {
    const CubicalSet cs = cubical_set(f, Limits::FromEnv());
    const auto nearest = nearest_facet(cs, model_mu(model, r.final_params).mu);
    r.distance_to_cphi = nearest.distance;
    r.nearest_facet = nearest.index;
  }
  return r;
}

MinimumReport classify_minimum(const Formula& f, const ModelSpec& model,
                               const RunResult& r) {
  const TruthTable table(f, Limits::FromEnv());
  MinimumReport m;
  double best = -1.0;
  for (std::size_t w = 0; w < r.final_dense.probs.size(); ++w) {
    const double p = r.final_dense.probs[w];
    if (!table(w)) {
      m.impossible_mass += p;
    } else if (p > best) {
      best = p;
      m.nearest_vertex = World{w};
    }
  }
  m.vertex_distance = 1.0 - std::max(best, 0.0);
  m.near_vertex = m.vertex_distance < kNearVertex;
  if (model.kind == ModelKind::kIndependentSigmoid) {
    const CubicalSet cs = cubical_set(f, Limits::FromEnv());
    const IndependentParams mu = model_mu(model, r.final_params);
    const auto nearest = nearest_facet(cs, mu.mu);
    m.facet = cs.facets[nearest.index].to_string();
    m.distance = nearest.distance;
    m.deterministic = deterministic_assignment(mu, kPossibleDistance).to_string(f.n());
  }
  return m;
}

void write_endpoints_csv(std::ostream& out, const Formula& f,
                         const ExperimentReport& report) {
  const std::size_t worlds = std::size_t{1} << f.n();
  out << "run_id,model,loss_kind,alpha,seed,final_loss,dist_Cphi,nearest_facet";
  for (std::size_t w = 0; w < worlds; ++w) out << ",p_" << f.world_string(World{w});
  for (std::size_t w = 0; w < worlds; ++w) out << ",init_p_" << f.world_string(World{w});
  out << ",status\n";
  const CubicalSet cs = cubical_set(f, Limits::FromEnv());
  for (const auto& mr : report.models) {
    for (const auto& r : mr.runs) {
      out << r.run_id << ',' << mr.model.name() << ',' << report.config.loss.name()
          << ',' << FormatDouble(report.config.loss.alpha) << ',' << r.seed << ','
          << FormatDouble(r.final_loss) << ',';
      if (r.distance_to_cphi) out << FormatDouble(*r.distance_to_cphi);
      out << ',';
      if (r.nearest_facet) out << cs.facets[*r.nearest_facet].to_string();
      for (std::size_t w = 0; w < worlds; ++w) {
        out << ',';
        if (w < r.final_dense.probs.size()) out << FormatDouble(r.final_dense.probs[w]);
      }
      for (std::size_t w = 0; w < worlds; ++w) {
        out << ',';
        if (w < r.init_dense.probs.size()) out << FormatDouble(r.init_dense.probs[w]);
      }
      out << ',' << (r.failure.empty() ? (r.stalled ? "stalled" : "ok") : r.failure)
          << '\n';
    }
  }
}

void write_trajectories_csv(std::ostream& out, const Formula& f,
                            const ExperimentReport& report) {
  const std::size_t worlds = std::size_t{1} << f.n();
  out << "run_id,step,loss";
  for (std::size_t w = 0; w < worlds; ++w) out << ",p_" << f.world_string(World{w});
  out << '\n';
  for (const auto& mr : report.models) {
    for (const auto& r : mr.runs) {
      for (const auto& s : r.trajectory) {
        out << r.run_id << ',' << s.step << ',' << FormatDouble(s.loss);
        for (double p : s.probs) out << ',' << FormatDouble(p);
        out << '\n';
      }
    }
  }
}

}  // namespace losscape
