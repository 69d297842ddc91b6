#include "losscape/distributions.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace losscape {
namespace {

std::uint64_t AllOnes(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void CheckUnitInterval(const std::vector<double>& mu) {
  for (double x : mu) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidArgument("independent parameters must lie in [0, 1]");
    }
  }
}

}  // namespace

IndependentParams::IndependentParams(std::vector<double> values)
    : mu(std::move(values)) {
  CheckUnitInterval(mu);
}

DenseDistribution::DenseDistribution(std::vector<double> values)
    : probs(std::move(values)) {
  if (probs.empty() || (probs.size() & (probs.size() - 1)) != 0) {
    throw InvalidArgument("dense distribution length must be a power of two");
  }
  double total = 0.0;
  for (double x : probs) {
    if (!(x >= 0.0)) throw InvalidArgument("negative world probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("world probabilities must sum to 1");
  }
}

int DenseDistribution::n() const {
  return std::countr_zero(static_cast<std::uint64_t>(probs.size()));
}

MixtureParams::MixtureParams(std::vector<double> a,
                             std::vector<IndependentParams> comps)
    : alpha(std::move(a)), components(std::move(comps)) {
  if (alpha.empty() || alpha.size() != components.size()) {
    throw InvalidArgument("mixture needs k >= 1 weights and k components");
  }
  double total = 0.0;
  for (double x : alpha) {
    if (!(x >= 0.0)) throw InvalidArgument("negative mixture weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("mixture weights must sum to 1");
  }
  for (const auto& c : components) {
    if (c.n() != components.front().n()) {
      throw InvalidArgument("mixture components differ in dimension");
    }
  }
}

DenseDistribution densify(const IndependentParams& p, const Limits& limits) {
  check_enumerable(p.n(), limits);
  std::vector<double> probs{1.0};
  probs.reserve(std::size_t{1} << p.n());
  for (int i = 0; i < p.n(); ++i) {
    const double m = p.mu[static_cast<std::size_t>(i)];
    const std::size_t half = probs.size();
    probs.resize(2 * half);
    for (std::size_t w = 0; w < half; ++w) {
      probs[w + half] = probs[w] * m;
      probs[w] *= 1.0 - m;
    }
  }
  DenseDistribution out;
  out.probs = std::move(probs);
  return out;
}

DenseDistribution densify(const MixtureParams& m, const Limits& limits) {
  check_enumerable(m.n(), limits);
  DenseDistribution out;
  out.probs.assign(std::size_t{1} << m.n(), 0.0);
  for (std::size_t c = 0; c < m.k(); ++c) {
    if (m.alpha[c] == 0.0) continue;
    const DenseDistribution part = densify(m.components[c], limits);
    for (std::size_t w = 0; w < out.probs.size(); ++w) {
      out.probs[w] += m.alpha[c] * part.probs[w];
    }
  }
  return out;
}

void write_dense_csv(std::ostream& out, const DenseDistribution& p) {
  out << "world_bits,probability\n";
  char buf[64];
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", w, p.probs[w]);
    out << buf;
  }
}

IndependentParams marginals(const DenseDistribution& p) {
  const int n = p.n();
  std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    for (int i = 0; i < n; ++i) {
      if ((w >> i) & 1u) mu[static_cast<std::size_t>(i)] += p.probs[w];
    }
  }
  for (double& x : mu) x = std::clamp(x, 0.0, 1.0);
  return IndependentParams(std::move(mu));
}

double wmc(const TruthTable& table, const DenseDistribution& p) {
  if (p.probs.size() != table.num_worlds()) {
    throw InvalidArgument("distribution and formula differ in dimension");
  }
  double total = 0.0;
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    if (table(w)) total += p.probs[w];
  }
  return total;
}

double wmc(const Formula& f, const DenseDistribution& p, const Limits& limits) {
  return wmc(TruthTable(f, limits), p);
}

PartialAssignment deterministic_assignment(const IndependentParams& p,
                                           double eps) {
  std::uint64_t bits = 0, mask = 0;
  for (int i = 0; i < p.n(); ++i) {
    const double m = p.mu[static_cast<std::size_t>(i)];
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (m <= eps) {
      mask |= bit;
    } else if (1.0 - m <= eps) {
      mask |= bit;
      bits |= bit;
    }
  }
  return {bits, mask};
}

bool is_possible(const TruthTable& table, const IndependentParams& p,
                 double eps) {
  if (p.n() != table.n()) throw InvalidArgument("parameter dimension mismatch");
  return is_implicant(table, deterministic_assignment(p, eps));
}

bool is_possible(const Formula& f, const IndependentParams& p,
                 const Limits& limits) {
  return is_possible(TruthTable(f, limits), p);
}

DenseDistribution condition(const TruthTable& table, const DenseDistribution& p) {
  const double z = wmc(table, p);
  if (!(z > 0.0)) throw ZeroEvidence("constraint has zero probability under p");
  DenseDistribution out;
  out.probs.resize(p.probs.size());
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    out.probs[w] = table(w) ? p.probs[w] / z : 0.0;
  }
  return out;
}

DenseDistribution condition(const Formula& f, const DenseDistribution& p,
                            const Limits& limits) {
  return condition(TruthTable(f, limits), p);
}

bool conditional_entails_implicant(const TruthTable& table,
                                   const PartialAssignment& evidence) {
  const std::uint64_t all = AllOnes(table.n());
  const std::uint64_t free = all & ~evidence.mask;
  std::uint64_t and_all = all, or_all = 0;
  bool any = false;
  std::uint64_t sub = 0;
  while (true) {
    const std::uint64_t w = evidence.bits | sub;
    if (table(w)) {
      any = true;
      and_all &= w;
      or_all |= w;
    }
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  if (!any) return false;
  // Every implicant entailed here generalises the assignment on which all
  // possible worlds of the cover agree, so testing that one suffices.
  const std::uint64_t agree = all & ~(and_all ^ or_all);
  return is_implicant(table, PartialAssignment(and_all & agree, agree));
}

std::optional<IndependentParams> representable_conditional(
    const TruthTable& table, const IndependentParams& p) {
  const DenseDistribution dense = densify(p);
  const DenseDistribution cond = condition(table, dense);  // may throw
  if (!conditional_entails_implicant(table, deterministic_assignment(p))) {
    return std::nullopt;
  }
  IndependentParams q = marginals(cond);
  const DenseDistribution rebuilt = densify(q);
  for (std::size_t w = 0; w < cond.probs.size(); ++w) {
    if (std::abs(rebuilt.probs[w] - cond.probs[w]) > 1e-9) {
      throw InternalError("conditional failed to factorise despite an "
                          "entailed implicant");
    }
  }
  return q;
}

std::optional<IndependentParams> representable_conditional(
    const Formula& f, const IndependentParams& p, const Limits& limits) {
  return representable_conditional(TruthTable(f, limits), p);
}

std::vector<World> mixture_support(const Formula& f, const MixtureParams& m) {
  if (m.n() != f.n()) throw InvalidArgument("mixture dimension mismatch");
  check_enumerable(f.n(), Limits{});
  const std::uint64_t all = AllOnes(f.n());
  std::vector<World> out;
  for (std::size_t c = 0; c < m.k(); ++c) {
    if (!(m.alpha[c] > 0.0)) continue;
    const PartialAssignment det = deterministic_assignment(m.components[c], 0.0);
    const std::uint64_t free = all & ~det.mask;
    std::uint64_t sub = 0;
    while (true) {
      out.push_back(World{det.bits | sub});
      if (sub == free) break;
      sub = (sub - free) & free;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MixtureBounds mixture_bounds(const Formula& f, const Limits& limits) {
  const TruthTable table(f, limits);
  const PrimeImplicantSet pis = prime_implicants(f, table, limits);
  MixtureBounds b;
  b.min_components = minimal_cover_indices(pis, table).size();
  b.upper = static_cast<std::size_t>(table.count());
  const std::size_t slots = static_cast<std::size_t>(f.n()) + 1;
  b.simplex_lower = (b.upper + slots - 1) / slots;
  return b;
}

}  // namespace losscape
