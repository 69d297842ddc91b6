#include <algorithm>
#include <cmath>
#include <queue>

#include "losscape/distributions.h"

namespace losscape {
namespace {

MixtureParams Lerp(const MixtureParams& a, const MixtureParams& b, double t) {
  MixtureParams out = a;
  for (std::size_t c = 0; c < a.k(); ++c) {
    out.alpha[c] = (1.0 - t) * a.alpha[c] + t * b.alpha[c];
    for (std::size_t i = 0; i < a.components[c].mu.size(); ++i) {
      out.components[c].mu[i] = std::clamp(
          (1.0 - t) * a.components[c].mu[i] + t * b.components[c].mu[i], 0.0,
          1.0);
    }
  }
  return out;
}

std::vector<double> Basis(std::size_t k, std::size_t i) {
  std::vector<double> e(k, 0.0);
  e[i] = 1.0;
  return e;
}

std::size_t ArgMax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

bool Equal(const MixtureParams& a, const MixtureParams& b) {
  if (a.alpha != b.alpha) return false;
  for (std::size_t c = 0; c < a.k(); ++c) {
    if (a.components[c].mu != b.components[c].mu) return false;
  }
  return true;
}

void RequirePossible(const TruthTable& table, const MixtureParams& m,
                     const char* which) {
  for (std::size_t c = 0; c < m.k(); ++c) {
    if (m.alpha[c] > 0.0 && !is_possible(table, m.components[c])) {
      throw NotPossible(std::string(which) + " endpoint has impossible "
                        "component " + std::to_string(c) + " with positive weight");
    }
  }
}

// Waypoints for k >= 2: collapse onto one component, hand the mass over to
// the target component through a spare slot, move the idle slots, re-expand.
std::vector<MixtureParams> MixtureWaypoints(const MixtureParams& m1,
                                            const MixtureParams& m2) {
  const std::size_t k = m1.k();
  std::vector<MixtureParams> pts{m1};
  const std::size_t i = ArgMax(m1.alpha);
  const std::size_t j = ArgMax(m2.alpha);
  MixtureParams cur = m1;
  cur.alpha = Basis(k, i);
  pts.push_back(cur);
  if (j != i) {
    cur.components[j] = m2.components[j];
    pts.push_back(cur);
    cur.alpha = Basis(k, j);
    pts.push_back(cur);
  } else {
    const std::size_t h = (i + 1) % k;
    cur.components[h] = m2.components[i];
    pts.push_back(cur);
    cur.alpha = Basis(k, h);
    pts.push_back(cur);
    cur.components[i] = m2.components[i];
    pts.push_back(cur);
    cur.alpha = Basis(k, i);
    pts.push_back(cur);
  }
  cur.components = m2.components;
  pts.push_back(cur);
  pts.push_back(m2);
  return pts;
}

std::size_t ContainingFacet(const CubicalSet& cs, const IndependentParams& p) {
  for (std::size_t f = 0; f < cs.facets.size(); ++f) {
    if (linf_distance(cs.facets[f], p.mu) <= kDeterministicEps) return f;
  }
  throw NotPossible("parameter is not in the set of possible parameters");
}

std::vector<double> VertexOf(const ElementaryCube& facet,
                             const std::vector<double>& mu) {
  std::vector<double> v(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    switch (facet.interval(static_cast<int>(i))) {
      case Interval::kZero: v[i] = 0.0; break;
      case Interval::kOne: v[i] = 1.0; break;
      case Interval::kFull: v[i] = mu[i] >= 0.5 ? 1.0 : 0.0; break;
    }
  }
  return v;
}

std::uint64_t ToBits(const std::vector<double>& vertex) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < vertex.size(); ++i) {
    if (vertex[i] == 1.0) bits |= std::uint64_t{1} << i;
  }
  return bits;
}

// Waypoints for k == 1: slide to a vertex of the containing facet, walk the
// prime implicant graph (each edge lies inside a prime implicant cube), and
// slide out to the target.
std::vector<MixtureParams> SingleComponentWaypoints(const Formula& f,
                                                    const MixtureParams& m1,
                                                    const MixtureParams& m2,
                                                    const Limits& limits) {
  const PrimeImplicantSet pis = prime_implicants(f, limits);
  const CubicalSet cs = cubical_set(pis);
  const auto& mu1 = m1.components[0].mu;
  const auto& mu2 = m2.components[0].mu;
  const auto v1 = VertexOf(cs.facets[ContainingFacet(cs, m1.components[0])], mu1);
  const auto v2 = VertexOf(cs.facets[ContainingFacet(cs, m2.components[0])], mu2);

  const ImplicantGraph g = implicant_graph(f, pis, limits);
  auto index_of = [&](std::uint64_t bits) {
    return static_cast<std::size_t>(
        std::lower_bound(g.vertices.begin(), g.vertices.end(), World{bits}) -
        g.vertices.begin());
  };
  const std::size_t src = index_of(ToBits(v1));
  const std::size_t dst = index_of(ToBits(v2));
  std::vector<std::vector<std::size_t>> adj(g.vertices.size());
  for (const auto& [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> prev(g.vertices.size(), g.vertices.size());
  std::queue<std::size_t> frontier;
  frontier.push(src);
  prev[src] = src;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adj[u]) {
      if (prev[v] == g.vertices.size()) {
        prev[v] = u;
        frontier.push(v);
      }
    }
  }
  if (prev[dst] == g.vertices.size()) {
    throw NotPossible("with one component the endpoints lie in different "
                      "connected components of the possible parameters");
  }
  std::vector<std::size_t> route{dst};
  while (route.back() != src) route.push_back(prev[route.back()]);
  std::reverse(route.begin(), route.end());

  auto at = [&](std::vector<double> mu) {
    MixtureParams m = m1;
    m.components[0].mu = std::move(mu);
    return m;
  };
  std::vector<MixtureParams> pts{m1, at(v1)};
  for (std::size_t r = 1; r < route.size(); ++r) {
    std::vector<double> v(mu1.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = g.vertices[route[r]].value(static_cast<int>(i)) ? 1.0 : 0.0;
    }
    pts.push_back(at(std::move(v)));
  }
  pts.push_back(m2);
  return pts;
}

}  // namespace

std::vector<MixtureParams> mixture_path(const Formula& f,
                                        const MixtureParams& m1,
                                        const MixtureParams& m2, int steps,
                                        const Limits& limits) {
  if (steps < 2) throw InvalidArgument("a path needs at least 2 steps");
  if (m1.k() != m2.k() || m1.n() != f.n() || m2.n() != f.n()) {
    throw InvalidArgument("mixture endpoints differ in shape");
  }
  const TruthTable table(f, limits);
  RequirePossible(table, m1, "first");
  RequirePossible(table, m2, "second");
  if (Equal(m1, m2)) return std::vector<MixtureParams>(static_cast<std::size_t>(steps), m1);

  const std::vector<MixtureParams> pts =
      m1.k() >= 2 ? MixtureWaypoints(m1, m2)
                  : SingleComponentWaypoints(f, m1, m2, limits);
  const double segments = static_cast<double>(pts.size() - 1);
  std::vector<MixtureParams> path;
  path.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s + 1 < steps; ++s) {
    const double pos = segments * s / (steps - 1);
    const std::size_t seg = std::min(static_cast<std::size_t>(pos), pts.size() - 2);
    path.push_back(Lerp(pts[seg], pts[seg + 1], pos - static_cast<double>(seg)));
  }
  path.push_back(m2);
  return path;
}

}  // namespace losscape
