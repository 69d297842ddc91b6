#include <map>
#include <unordered_map>

#include "losscape/homology.h"

namespace losscape {
namespace {

std::uint64_t CubeKey(const ElementaryCube& c) {
  // mask and bits both fit in n <= 31 bits at any face-enumerable scale.
  return (c.mask() << 32) ^ c.bits();
}

}  // namespace

ChainComplex chain_complex(const CubicalSet& cs, const Limits& limits) {
  if (cs.facets.empty()) throw InvalidArgument("empty cubical set");
  if (cs.n > 31) throw LimitExceeded("chain complexes are limited to n <= 31");
  ChainComplex cc;
  const int n = cs.n;
  for (int k = 0; k <= n; ++k) cc.cubes_by_dim.push_back(faces(cs, k, limits));

  cc.boundary_by_dim.resize(static_cast<std::size_t>(n) + 1);
  cc.boundary_by_dim[0].rows = 0;
  cc.boundary_by_dim[0].cols = cc.cubes_by_dim[0].size();
  for (int k = 1; k <= n; ++k) {
    const auto& lower = cc.cubes_by_dim[static_cast<std::size_t>(k - 1)];
    const auto& upper = cc.cubes_by_dim[static_cast<std::size_t>(k)];
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) index.emplace(CubeKey(lower[i]), i);

    SparseIntMatrix& d = cc.boundary_by_dim[static_cast<std::size_t>(k)];
    d.rows = lower.size();
    d.cols = upper.size();
    for (std::size_t col = 0; col < upper.size(); ++col) {
      const ElementaryCube& q = upper[col];
      int sign = 1;  // (-1)^(m-1) over the free coordinates in order
      for (int i = 0; i < n; ++i) {
        if (q.interval(i) != Interval::kFull) continue;
        const std::uint64_t bit = std::uint64_t{1} << i;
        const ElementaryCube hi(q.bits() | bit, q.mask() | bit, n);
        const ElementaryCube lo(q.bits(), q.mask() | bit, n);
        d.entries.push_back({index.at(CubeKey(hi)), col, sign});
        d.entries.push_back({index.at(CubeKey(lo)), col, -sign});
        sign = -sign;
      }
    }
  }
  return cc;
}

bool boundary_squares_to_zero(const ChainComplex& cc) {
  for (std::size_t k = 2; k < cc.boundary_by_dim.size(); ++k) {
    const auto& outer = cc.boundary_by_dim[k - 1];  // C_{k-1} -> C_{k-2}
    const auto& inner = cc.boundary_by_dim[k];      // C_k -> C_{k-1}
    // Column-wise sparse product.
    std::vector<std::vector<std::pair<std::size_t, int>>> outer_cols(outer.cols);
    for (const auto& e : outer.entries) outer_cols[e.col].emplace_back(e.row, e.value);
    std::vector<std::map<std::size_t, long long>> product(inner.cols);
    for (const auto& e : inner.entries) {
      for (const auto& [row, value] : outer_cols[e.row]) {
        product[e.col][row] += static_cast<long long>(e.value) * value;
      }
    }
    for (const auto& col : product) {
      for (const auto& [row, value] : col) {
        if (value != 0) return false;
      }
    }
  }
  return true;
}

namespace {

std::vector<BigInt> InvariantFactors(const SparseIntMatrix& m,
                                     const HomologyOptions& opts) {
  if (m.rows == 0 || m.cols == 0) return {};
  if (m.rows * m.cols <= opts.dense_max_entries) {
    const IntMatrix dense = m.to_dense();
    SmithForm snf = smith_normal_form(dense, opts.verify_smith);
    if (opts.verify_smith && !verify_smith_form(dense, snf)) {
      throw InternalError("Smith normal form failed verification");
    }
    return std::move(snf.invariant_factors);
  }
  return sparse_invariant_factors(m);
}

}  // namespace

HomologyResult homology(const ChainComplex& cc, const HomologyOptions& opts) {
  const std::size_t top = cc.cubes_by_dim.size();  // n + 1
  HomologyResult result;
  std::vector<std::vector<BigInt>> factors(top + 1);
  result.ranks.assign(top + 1, 0);
  for (std::size_t k = 1; k < top; ++k) {
    factors[k] = InvariantFactors(cc.boundary_by_dim[k], opts);
    result.ranks[k] = static_cast<long long>(factors[k].size());
  }
  for (std::size_t k = 0; k < top; ++k) {
    result.cube_counts.push_back(static_cast<long long>(cc.cubes_by_dim[k].size()));
  }
  // H_n of a subset of R^n is free of rank zero, so report k < n.
  for (std::size_t k = 0; k + 1 < top; ++k) {
    result.betti.push_back(result.cube_counts[k] - result.ranks[k] -
                           result.ranks[k + 1]);
    std::vector<std::string> tors;
    for (const auto& f : factors[k + 1]) {
      if (f > 1) tors.push_back(f.str());
    }
    result.torsion.push_back(std::move(tors));
  }
  result.ranks.resize(top);
  return result;
}

HomologyResult homology(const CubicalSet& cs, const HomologyOptions& opts,
                        const Limits& limits) {
  return homology(chain_complex(cs, limits), opts);
}

}  // namespace losscape
