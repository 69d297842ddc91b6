#include "losscape/cubical.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

namespace losscape {
namespace {

std::uint64_t AllOnes(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace

ElementaryCube::ElementaryCube(std::uint64_t bits, std::uint64_t mask, int n)
    : bits_(bits), mask_(mask), n_(n) {
  if (n < 0 || n > kMaxBitVars || (mask & ~AllOnes(n)) != 0 ||
      (bits & ~mask) != 0) {
    throw InvalidArgument("malformed elementary cube");
  }
}

int ElementaryCube::dim() const { return n_ - std::popcount(mask_); }

Interval ElementaryCube::interval(int i) const {
  if (!((mask_ >> i) & 1u)) return Interval::kFull;
  return ((bits_ >> i) & 1u) ? Interval::kOne : Interval::kZero;
}

std::vector<Interval> ElementaryCube::intervals() const {
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out.push_back(interval(i));
  return out;
}

bool ElementaryCube::contains(const ElementaryCube& other) const {
  return (other.mask_ & mask_) == mask_ && (other.bits_ & mask_) == bits_;
}

std::string ElementaryCube::to_string() const {
  std::string out(static_cast<std::size_t>(n_), '*');
  for (int i = 0; i < n_; ++i) {
    if ((mask_ >> i) & 1u) {
      out[static_cast<std::size_t>(i)] = ((bits_ >> i) & 1u) ? '1' : '0';
    }
  }
  return out;
}

ElementaryCube ElementaryCube::FromString(std::string_view s) {
  std::uint64_t bits = 0, mask = 0;
  if (s.size() > static_cast<std::size_t>(kMaxBitVars)) {
    throw InvalidArgument("cube string too long");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    switch (s[i]) {
      case '0': mask |= bit; break;
      case '1': mask |= bit; bits |= bit; break;
      case '*': break;
      default: throw InvalidArgument("cube string may only contain 0, 1, *");
    }
  }
  return ElementaryCube(bits, mask, static_cast<int>(s.size()));
}

ElementaryCube cube_of(const PartialAssignment& pa, int n) {
  return ElementaryCube(pa.bits, pa.mask, n);
}

CubicalSet cubical_set(const PrimeImplicantSet& pis) {
  CubicalSet cs;
  cs.n = pis.n;
  for (const auto& pi : pis.items) cs.facets.push_back(cube_of(pi, pis.n));
  return cs;
}

CubicalSet cubical_set(const Formula& f, const Limits& limits) {
  return cubical_set(prime_implicants(f, limits));
}

double linf_distance(const ElementaryCube& cube, std::span<const double> mu) {
  double worst = 0.0;
  for (int i = 0; i < cube.n(); ++i) {
    const double x = mu[static_cast<std::size_t>(i)];
    double r = 0.0;
    switch (cube.interval(i)) {
      case Interval::kZero: r = std::abs(x); break;
      case Interval::kOne: r = std::abs(x - 1.0); break;
      case Interval::kFull: r = x < 0.0 ? -x : (x > 1.0 ? x - 1.0 : 0.0); break;
    }
    worst = std::max(worst, r);
  }
  return worst;
}

double l2_distance(const ElementaryCube& cube, std::span<const double> mu) {
  double sum = 0.0;
  for (int i = 0; i < cube.n(); ++i) {
    const double x = mu[static_cast<std::size_t>(i)];
    double r = 0.0;
    switch (cube.interval(i)) {
      case Interval::kZero: r = x; break;
      case Interval::kOne: r = x - 1.0; break;
      case Interval::kFull: r = x - std::clamp(x, 0.0, 1.0); break;
    }
    sum += r * r;
  }
  return std::sqrt(sum);
}

bool contains(const CubicalSet& cs, std::span<const double> mu, double eps) {
  if (mu.size() != static_cast<std::size_t>(cs.n)) {
    throw InvalidArgument("point dimension does not match the cubical set");
  }
  return std::any_of(cs.facets.begin(), cs.facets.end(), [&](const auto& c) {
    return linf_distance(c, mu) <= eps;
  });
}

NearestFacet nearest_facet(const CubicalSet& cs, std::span<const double> mu) {
  if (mu.size() != static_cast<std::size_t>(cs.n)) {
    throw InvalidArgument("point dimension does not match the cubical set");
  }
  if (cs.facets.empty()) throw InvalidArgument("empty cubical set");
  NearestFacet best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < cs.facets.size(); ++i) {
    const double d = l2_distance(cs.facets[i], mu);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

double distance(const CubicalSet& cs, std::span<const double> mu) {
  return nearest_facet(cs, mu).distance;
}

std::vector<ElementaryCube> boundary_faces(const ElementaryCube& cube) {
  std::vector<ElementaryCube> out;
  for (int i = 0; i < cube.n(); ++i) {
    if (cube.interval(i) != Interval::kFull) continue;
    const std::uint64_t bit = std::uint64_t{1} << i;
    out.emplace_back(cube.bits(), cube.mask() | bit, cube.n());
    out.emplace_back(cube.bits() | bit, cube.mask() | bit, cube.n());
  }
  return out;
}

std::vector<ElementaryCube> faces(const CubicalSet& cs, int k,
                                  const Limits& limits) {
  if (k < 0 || k > cs.n) throw InvalidArgument("face dimension out of range");
  std::set<ElementaryCube> seen;
  for (const auto& facet : cs.facets) {
    const int d = facet.dim();
    if (d < k) continue;
    std::vector<int> free;
    for (int i = 0; i < cs.n; ++i) {
      if (facet.interval(i) == Interval::kFull) free.push_back(i);
    }
    // Choose which free coordinates to pin (a (d-k)-subset), then their
    // values.
    const std::uint64_t subsets = std::uint64_t{1} << d;
    for (std::uint64_t pick = 0; pick < subsets; ++pick) {
      if (std::popcount(pick) != d - k) continue;
      std::uint64_t pin_mask = 0;
      for (int j = 0; j < d; ++j) {
        if ((pick >> j) & 1u) pin_mask |= std::uint64_t{1} << free[static_cast<std::size_t>(j)];
      }
      std::uint64_t values = 0;
      while (true) {
        seen.emplace(facet.bits() | values, facet.mask() | pin_mask, cs.n);
        if (seen.size() > limits.max_terms) {
          throw LimitExceeded("face lattice exceeds " +
                              std::to_string(limits.max_terms) + " cubes");
        }
        if (values == pin_mask) break;
        values = (values - pin_mask) & pin_mask;
      }
    }
  }
  return {seen.begin(), seen.end()};
}

bool is_convex(const Formula& f, const Limits& limits) {
  return prime_implicants(f, limits).size() == 1;
}

namespace {

std::vector<double> Center(const ElementaryCube& c) {
  std::vector<double> out;
  for (Interval iv : c.intervals()) {
    out.push_back(iv == Interval::kZero ? 0.0 : iv == Interval::kOne ? 1.0 : 0.5);
  }
  return out;
}

}  // namespace

std::optional<ConvexityWitness> find_convexity_witness(const CubicalSet& cs) {
  // The midpoint of two distinct facet centres is deterministic exactly on
  // the coordinates both facets fix to the same value. That assignment
  // generalises both prime implicants, so it is never an implicant.
  constexpr double kLambdas[] = {0.5, 0.25, 0.75};
  for (std::size_t i = 0; i < cs.facets.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.facets.size(); ++j) {
      const auto a = Center(cs.facets[i]);
      const auto b = Center(cs.facets[j]);
      for (double lambda : kLambdas) {
        std::vector<double> mix(a.size());
        for (std::size_t t = 0; t < a.size(); ++t) {
          mix[t] = lambda * a[t] + (1.0 - lambda) * b[t];
        }
        if (!contains(cs, mix, kDeterministicEps)) {
          return ConvexityWitness{a, b, lambda, mix};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace losscape
