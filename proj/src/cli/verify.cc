#include "losscape/cli/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "losscape/cubical.h"
#include "losscape/distributions.h"
#include "losscape/homology.h"
#include "losscape/implicants.h"
#include "losscape/losses.h"
#include "losscape/optimize.h"

namespace losscape::cli {
namespace {

constexpr int kMaxCounterexamples = 3;

ExprPtr Literal(std::mt19937_64& rng, int n) {
  const int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
  ExprPtr x = Expr::Var(v);
  return std::bernoulli_distribution(0.5)(rng) ? Expr::Not(x) : x;
}

ExprPtr RandomDnf(std::mt19937_64& rng, int n) {
  const int terms = std::uniform_int_distribution<int>(1, std::min(6, n + 1))(rng);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  ExprPtr out;
  for (int t = 0; t < terms; ++t) {
    // Distinct variables per term.
    std::shuffle(order.begin(), order.end(), rng);
    const int lits = std::uniform_int_distribution<int>(1, std::min(n, 4))(rng);
    ExprPtr term;
    for (int l = 0; l < lits; ++l) {
      ExprPtr x = Expr::Var(order[static_cast<std::size_t>(l)]);
      if (std::bernoulli_distribution(0.5)(rng)) x = Expr::Not(x);
      term = term ? Expr::Binary(Op::kAnd, term, x) : x;
    }
    out = out ? Expr::Binary(Op::kOr, out, term) : term;
  }
  return out;
}

ExprPtr RandomNnf(std::mt19937_64& rng, int n, int depth, bool root = true) {
  if (depth == 0 || (!root && std::bernoulli_distribution(0.15)(rng))) {
    return Literal(rng, n);
  }
  const Op op = std::bernoulli_distribution(0.5)(rng) ? Op::kAnd : Op::kOr;
  return Expr::Binary(op, RandomNnf(rng, n, depth - 1, false),
                      RandomNnf(rng, n, depth - 1, false));
}

std::vector<double> RandomMu(std::mt19937_64& rng, int n) {
  std::vector<double> mu(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& m : mu) {
    const double r = u(rng);
    m = r < 1.0 / 3 ? 0.0 : r < 2.0 / 3 ? 1.0 : 0.01 + 0.98 * u(rng);
  }
  return mu;
}

std::string Show(const std::vector<double>& v) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ')';
  return out.str();
}

// Every partial assignment over n variables.
std::vector<PartialAssignment> AllPartials(int n) {
  std::vector<PartialAssignment> out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 0; mask <= full; ++mask) {
    std::uint64_t sub = 0;
    while (true) {
      out.emplace_back(sub, mask);
      if (sub == mask) break;
      sub = (sub - mask) & mask;
    }
  }
  return out;
}

// Direct evaluation over the cover, without a truth table.
bool BruteImplicant(const Formula& f, const PartialAssignment& pa) {
  const std::uint64_t worlds = std::uint64_t{1} << f.n();
  for (std::uint64_t w = 0; w < worlds; ++w) {
    if (pa.covers(World{w}) && !eval_world(f, World{w})) return false;
  }
  return true;
}

std::vector<PartialAssignment> BrutePrimes(const Formula& f) {
  std::vector<PartialAssignment> implicants;
  for (const auto& pa : AllPartials(f.n())) {
    if (BruteImplicant(f, pa)) implicants.push_back(pa);
  }
  std::vector<PartialAssignment> primes;
  for (const auto& a : implicants) {
    const bool dominated = std::any_of(
        implicants.begin(), implicants.end(),
        [&](const PartialAssignment& b) { return b != a && b.covers(a); });
    if (!dominated) primes.push_back(a);
  }
  std::sort(primes.begin(), primes.end(), ImplicantOrder);
  return primes;
}

struct Case {
  std::mt19937_64 rng;
  Formula f;
};

class SuiteRunner {
 public:
  SuiteRunner(std::string name, const VerifyOptions& opts) : opts_(opts) {
    result_.name = std::move(name);
  }

  // Runs `check` on `cases` random formulas; check returns an empty string
  // on success and a description otherwise.
  SuiteResult Run(const std::function<std::string(Case&)>& check) {
    const auto start = std::chrono::steady_clock::now();
    std::seed_seq seq{static_cast<std::uint32_t>(opts_.seed),
                      static_cast<std::uint32_t>(opts_.seed >> 32),
                      static_cast<std::uint32_t>(std::hash<std::string>{}(result_.name))};
    std::mt19937_64 master(seq);
    for (int c = 0; c < opts_.cases; ++c) {
      std::mt19937_64 rng(master());
      Formula f = random_formula(rng, opts_.max_n);
      Case cs{rng, std::move(f)};
      std::string failure;
      try {
        failure = check(cs);
      } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
      }
      ++result_.cases;
      if (!failure.empty()) {
        ++result_.failures;
        if (result_.counterexamples.size() < kMaxCounterexamples) {
          result_.counterexamples.push_back(cs.f.to_string() + ": " + failure);
        }
      }
    }
    result_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result_;
  }

 private:
  const VerifyOptions& opts_;
  SuiteResult result_;
};

SuiteResult Possibility(const VerifyOptions& opts) {
  return SuiteRunner("possibility", opts).Run([&](Case& c) -> std::string {
    const TruthTable table(c.f);
    const CubicalSet cs = cubical_set(c.f);
    const double eps = opts.inject_bug ? 0.25 : 0.0;
    for (int s = 0; s < 4; ++s) {
      const auto mu = RandomMu(c.rng, c.f.n());
      const bool poss = is_possible(table, IndependentParams(mu));
      const bool full = std::abs(wmc(table, densify(IndependentParams(mu))) - 1.0) <= 1e-12;
      const bool member = contains(cs, mu, eps);
      if (poss != full || poss != member) {
        return "mu=" + Show(mu) + " is_possible=" + std::to_string(poss) +
               " wmc_is_1=" + std::to_string(full) +
               " in_cubical_set=" + std::to_string(member);
      }
    }
    return {};
  });
}

SuiteResult Conditioning(const VerifyOptions& opts) {
  return SuiteRunner("conditioning", opts).Run([&](Case& c) -> std::string {
    const TruthTable table(c.f);
    const auto partials = AllPartials(c.f.n());
    std::vector<PartialAssignment> implicants;
    for (const auto& pa : partials) {
      if (BruteImplicant(c.f, pa)) implicants.push_back(pa);
    }
    for (int s = 0; s < 4; ++s) {
      const IndependentParams mu(RandomMu(c.rng, c.f.n()));
      const DenseDistribution p = densify(mu);
      if (!(wmc(table, p) > 0.0)) {
        try {
          representable_conditional(table, mu);
        } catch (const ZeroEvidence&) {
          continue;
        }
        return "mu=" + Show(mu.mu) + " zero evidence not reported";
      }
      // Condition 2: an implicant covers every possible world in the support.
      bool cond2 = false;
      for (const auto& d : implicants) {
        bool ok = true;
        for (std::size_t w = 0; w < p.probs.size() && ok; ++w) {
          if (p.probs[w] > 0.0 && eval_world(c.f, World{w}) && !d.covers(World{w})) ok = false;
        }
        if (ok) {
          cond2 = true;
          break;
        }
      }
      // Condition 3: w_E and phi entail an implicant.
      const PartialAssignment e = deterministic_assignment(mu, 0.0);
      bool cond3 = false;
      for (const auto& d : implicants) {
        bool ok = true;
        for (std::size_t w = 0; w < p.probs.size() && ok; ++w) {
          if (e.covers(World{w}) && eval_world(c.f, World{w}) && !d.covers(World{w})) ok = false;
        }
        if (ok) {
          cond3 = true;
          break;
        }
      }
      // Condition 1 directly: the conditional equals its own marginal product.
      const DenseDistribution cond = condition(table, p);
      const DenseDistribution product = densify(marginals(cond));
      bool cond1 = true;
      for (std::size_t w = 0; w < cond.probs.size(); ++w) {
        if (std::abs(cond.probs[w] - product.probs[w]) > 1e-9) cond1 = false;
      }
      const bool some = representable_conditional(table, mu).has_value();
      if (some != cond1 || some != cond2 || some != cond3) {
        return "mu=" + Show(mu.mu) + " representable=" + std::to_string(some) +
               " factorises=" + std::to_string(cond1) +
               " covering_implicant=" + std::to_string(cond2) +
               " entailed_implicant=" + std::to_string(cond3);
      }
    }
    return {};
  });
}

SuiteResult Minima(const VerifyOptions& opts) {
  return SuiteRunner("minima", opts).Run([&](Case& c) -> std::string {
    const PrimeImplicantSet pis = prime_implicants(c.f);
    const auto expected = BrutePrimes(c.f);
    if (pis.items != expected) {
      return "prime implicants differ from brute force (" +
             std::to_string(pis.size()) + " vs " + std::to_string(expected.size()) + ")";
    }
    const TruthTable table(c.f);
    const CubicalSet cs = cubical_set(pis);
    for (int s = 0; s < 4; ++s) {
      const auto mu = RandomMu(c.rng, c.f.n());
      const bool zero = semantic_loss(table, densify(IndependentParams(mu))) <= 1e-12;
      if (zero != contains(cs, mu)) {
        return "mu=" + Show(mu) + " zero_loss=" + std::to_string(zero);
      }
    }
    return {};
  });
}

SuiteResult Convexity(const VerifyOptions& opts) {
  return SuiteRunner("convexity", opts).Run([&](Case& c) -> std::string {
    const PrimeImplicantSet pis = prime_implicants(c.f);
    const CubicalSet cs = cubical_set(pis);
    const bool convex = is_convex(c.f);
    if (convex != (pis.size() == 1)) {
      return "is_convex=" + std::to_string(convex) + " with " +
             std::to_string(pis.size()) + " prime implicants";
    }
    const TruthTable table(c.f);
    if (!convex) {
      const auto wit = find_convexity_witness(cs);
      if (!wit) return "no witness for a non-convex set";
      if (!contains(cs, wit->a) || !contains(cs, wit->b)) return "witness endpoints outside";
      if (contains(cs, wit->mix) || is_possible(table, IndependentParams(wit->mix))) {
        return "witness combination " + Show(wit->mix) + " is possible";
      }
      return {};
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ElementaryCube& cube = cs.facets.front();
    auto sample = [&] {
      std::vector<double> mu(static_cast<std::size_t>(c.f.n()));
      for (int i = 0; i < c.f.n(); ++i) {
        const Interval iv = cube.interval(i);
        mu[static_cast<std::size_t>(i)] =
            iv == Interval::kZero ? 0.0 : iv == Interval::kOne ? 1.0 : u(c.rng);
      }
      return mu;
    };
    for (int s = 0; s < 8; ++s) {
      const auto a = sample(), b = sample();
      const double lambda = u(c.rng);
      std::vector<double> mix(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        mix[i] = std::clamp(lambda * a[i] + (1 - lambda) * b[i], 0.0, 1.0);
      }
      if (!is_possible(table, IndependentParams(mix))) {
        return "convex combination " + Show(mix) + " is impossible";
      }
    }
    return {};
  });
}

SuiteResult Connectivity(const VerifyOptions& opts) {
  return SuiteRunner("connectivity", opts).Run([&](Case& c) -> std::string {
    const PrimeImplicantSet pis = prime_implicants(c.f);
    const ImplicantGraph g = implicant_graph(c.f, pis);
    std::set<std::set<std::uint64_t>> from_graph;
    for (const auto& comp : connected_components(g)) {
      std::set<std::uint64_t> s;
      for (std::size_t v : comp) s.insert(g.vertices[v].bits);
      from_graph.insert(std::move(s));
    }
    // Union-find over the 1-skeleton of the cubical set.
    const CubicalSet cs = cubical_set(pis);
    const auto vertices = faces(cs, 0);
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i].bits()] = i;
    UnionFind uf(vertices.size());
    for (const auto& edge : faces(cs, 1)) {
      const std::uint64_t free = ~edge.mask() & ((std::uint64_t{1} << c.f.n()) - 1);
      uf.unite(index.at(edge.bits()), index.at(edge.bits() | free));
    }
    std::set<std::set<std::uint64_t>> from_skeleton;
    for (const auto& group : uf.groups()) {
      std::set<std::uint64_t> s;
      for (std::size_t v : group) s.insert(vertices[v].bits());
      from_skeleton.insert(std::move(s));
    }
    if (from_graph != from_skeleton) {
      return "graph components " + std::to_string(from_graph.size()) +
             " vs skeleton components " + std::to_string(from_skeleton.size());
    }
    const HomologyResult h = homology(cs);
    if (h.betti.empty() || h.betti[0] != static_cast<long long>(from_graph.size())) {
      return "betti_0 differs from component count " + std::to_string(from_graph.size());
    }
    return {};
  });
}

SuiteResult Boundary(const VerifyOptions& opts) {
  return SuiteRunner("boundary", opts).Run([&](Case& c) -> std::string {
    const CubicalSet cs = cubical_set(c.f);
    const ChainComplex cc = chain_complex(cs);
    if (!boundary_squares_to_zero(cc)) return "boundary of boundary is nonzero";
    for (std::size_t k = 1; k < cc.boundary_by_dim.size(); ++k) {
      const SparseIntMatrix& m = cc.boundary_by_dim[k];
      if (m.rows == 0 || m.cols == 0 || m.rows * m.cols > 20000) continue;
      const IntMatrix dense = m.to_dense();
      const SmithForm snf = smith_normal_form(dense, true);
      if (!verify_smith_form(dense, snf)) {
        return "Smith form of boundary " + std::to_string(k) + " fails verification";
      }
      if (snf.invariant_factors != sparse_invariant_factors(m)) {
        return "dense and sparse invariant factors differ at k=" + std::to_string(k);
      }
    }
    // Euler characteristic from cube counts and from Betti numbers.
    const HomologyResult h = homology(cc);
    long long chi_cubes = 0, chi_betti = 0;
    for (std::size_t k = 0; k < h.cube_counts.size(); ++k) {
      chi_cubes += (k % 2 ? -1 : 1) * h.cube_counts[k];
    }
    for (std::size_t k = 0; k < h.betti.size(); ++k) {
      chi_betti += (k % 2 ? -1 : 1) * h.betti[k];
    }
    if (chi_cubes != chi_betti) return "Euler characteristic mismatch";
    return {};
  });
}

double RelError(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, 1e-3);
}

template <typename Loss>
std::vector<double> CentralDifferences(std::vector<double> x, Loss loss) {
  constexpr double h = 1e-6;
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = loss(x);
    x[i] = keep - h;
    const double down = loss(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

SuiteResult Gradients(const VerifyOptions& opts) {
  return SuiteRunner("gradients", opts).Run([&](Case& c) -> std::string {
    constexpr double kTol = 1e-5;
    const TruthTable table(c.f);
    const int n = c.f.n();
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int attempt = 0;; ++attempt) {
      for (double& m : mu) m = u(c.rng);
      if (wmc(table, densify(IndependentParams(mu))) > 1e-3) break;
      if (attempt == 100) return {};
    }
    const auto analytic = semantic_grad_mu(table, IndependentParams(mu));
    const auto numeric = CentralDifferences(mu, [&](const std::vector<double>& x) {
      return semantic_loss(table, densify(IndependentParams(x)));
    });
    if (RelError(analytic, numeric) > kTol) {
      return "semantic_grad_mu at " + Show(mu) + " rel error " +
             std::to_string(RelError(analytic, numeric));
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    const LossSpec losses[] = {LossSpec::Semantic(),
                               LossSpec::SemanticEntropy(0.3)};
    const ModelSpec models[] = {ModelSpec::Independent(n), ModelSpec::Expressive(n),
                                ModelSpec::Mixture(n, 2)};
    for (const ModelSpec& model : models) {
      for (const LossSpec& loss : losses) {
        std::vector<double> params(model.num_params());
        for (double& p : params) p = normal(c.rng);
        if (model.kind == ModelKind::kIndependentSigmoid) {
          for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] = std::log(mu[i]) - std::log1p(-mu[i]);
          }
        }
        if (!(wmc(table, model_distribution(model, params)) > 1e-3)) continue;
        const auto g = model_grad(model, params, table, c.f, loss);
        const auto fd = CentralDifferences(params, [&](const std::vector<double>& x) {
          return model_loss(model, x, table, c.f, loss);
        });
        if (RelError(g, fd) > kTol) {
          return model.name() + "/" + loss.name() + " gradient rel error " +
                 std::to_string(RelError(g, fd));
        }
      }
    }
    return {};
  });
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& Suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"possibility", Possibility}, {"conditioning", Conditioning},
      {"minima", Minima},           {"convexity", Convexity},
      {"connectivity", Connectivity}, {"boundary", Boundary},
      {"gradients", Gradients},
  };
  return suites;
}

}  // namespace

Formula random_formula(std::mt19937_64& rng, int max_n) {
  if (max_n < 1 || max_n > 16) throw InvalidArgument("max-n must lie in [1, 16]");
  while (true) {
    const int n = std::uniform_int_distribution<int>(1, max_n)(rng);
    std::vector<std::string> vars;
    for (int i = 0; i < n; ++i) vars.push_back("x" + std::to_string(i));
    ExprPtr root = std::bernoulli_distribution(0.5)(rng) ? RandomDnf(rng, n)
                                                         : RandomNnf(rng, n, 4);
    Formula f(root, vars);
    if (TruthTable(f).count() > 0) return f;
  }
}

int VerifyReport::failures() const {
  int total = 0;
  for (const auto& s : suites) total += s.failures;
  return total;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : Suites()) names.push_back(name);
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts) {
  for (const auto& [suite, fn] : Suites()) {
    if (suite == name) return fn(opts);
  }
  throw InvalidArgument("unknown suite '" + name + "'");
}

VerifyReport run_verify(const VerifyOptions& opts) {
  if (opts.cases < 1) throw InvalidArgument("cases must be >= 1");
  VerifyReport report;
  for (const auto& [name, fn] : Suites()) report.suites.push_back(fn(opts));
  return report;
}

}  // namespace losscape::cli
