#include "losscape/implicants.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace losscape {
namespace {

std::uint64_t AllOnes(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

struct TermHash {
  std::size_t operator()(const PartialAssignment& t) const {
    std::uint64_t h = t.bits * 0x9E3779B97F4A7C15ull;
    h ^= t.mask + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Calls fn(World) for every world covered by pa within n variables.
template <typename Fn>
void ForEachExtension(const PartialAssignment& pa, int n, Fn&& fn) {
  const std::uint64_t free = AllOnes(n) & ~pa.mask;
  std::uint64_t sub = 0;
  while (true) {
    fn(World{pa.bits | sub});
    if (sub == free) break;
    sub = (sub - free) & free;  // next submask in increasing order
  }
}

}  // namespace

bool is_implicant(const TruthTable& table, const PartialAssignment& pa) {
  bool ok = true;
  ForEachExtension(pa, table.n(), [&](World w) { ok = ok && table(w); });
  return ok;
}

bool is_implicant(const Formula& f, const PartialAssignment& pa,
                  const Limits& limits) {
  const int free_vars = f.n() - std::popcount(pa.mask & AllOnes(f.n()));
  check_enumerable(free_vars, limits);
  if ((pa.mask & ~AllOnes(f.n())) != 0) {
    throw InvalidArgument("partial assignment exceeds the formula's variables");
  }
  bool ok = true;
  ForEachExtension(pa, f.n(), [&](World w) { ok = ok && eval_world(f, w); });
  return ok;
}

bool ImplicantOrder(const PartialAssignment& a, const PartialAssignment& b) {
  const int sa = a.size(), sb = b.size();
  if (sa != sb) return sa < sb;
  if (a.mask != b.mask) return a.mask < b.mask;
  return a.bits < b.bits;
}

PrimeImplicantSet prime_implicants(const Formula& f, const Limits& limits) {
  return prime_implicants(f, TruthTable(f, limits), limits);
}

PrimeImplicantSet prime_implicants(const Formula& f, const TruthTable& table,
                                   const Limits& limits) {
  const int n = f.n();
  const std::uint64_t full = AllOnes(n);

  // Current generation, bucketed by popcount of the assigned values.
  using Bucket = std::unordered_map<PartialAssignment, bool, TermHash>;
  std::vector<Bucket> groups(static_cast<std::size_t>(n) + 1);
  std::size_t generation_size = 0;
  for (std::uint64_t w = 0; w < table.num_worlds(); ++w) {
    if (!table(w)) continue;
    groups[static_cast<std::size_t>(std::popcount(w))].emplace(
        PartialAssignment(w, full), false);
    ++generation_size;
  }
  if (generation_size == 0) {
    throw Unsatisfiable("formula '" + f.to_string() +
                        "' has no possible worlds");
  }

  PrimeImplicantSet result;
  result.n = n;
  result.source_formula_hash = f.hash();

  while (generation_size > 0) {
    std::vector<Bucket> next(static_cast<std::size_t>(n) + 1);
    std::size_t next_size = 0;
    for (std::size_t c = 0; c + 1 < groups.size(); ++c) {
      Bucket& upper = groups[c + 1];
      if (upper.empty()) continue;
      for (auto& [term, combined] : groups[c]) {
        std::uint64_t zeros = term.mask & ~term.bits;
        while (zeros != 0) {
          const std::uint64_t bit = zeros & (~zeros + 1);
          zeros &= zeros - 1;
          auto partner = upper.find(PartialAssignment(term.bits | bit, term.mask));
          if (partner == upper.end()) continue;
          combined = true;
          partner->second = true;
          PartialAssignment merged(term.bits, term.mask & ~bit);
          if (next[c].emplace(merged, false).second) {
            if (++next_size > limits.max_terms) {
              throw PrimeImplicantOverflow(
                  "implicant table exceeds " +
                  std::to_string(limits.max_terms) + " terms");
            }
          }
        }
      }
    }
    for (const Bucket& bucket : groups) {
      for (const auto& [term, combined] : bucket) {
        if (combined) continue;
        result.items.push_back(term);
        if (result.items.size() > limits.max_prime_implicants) {
          throw PrimeImplicantOverflow(
              "more than " + std::to_string(limits.max_prime_implicants) +
              " prime implicants");
        }
      }
    }
    groups = std::move(next);
    generation_size = next_size;
  }
  std::sort(result.items.begin(), result.items.end(), ImplicantOrder);
  return result;
}

PrimeImplicantSet minimal_cover(const PrimeImplicantSet& pis, const Formula& f,
                                const Limits& limits) {
  const TruthTable table(f, limits);
  PrimeImplicantSet out;
  out.n = pis.n;
  out.source_formula_hash = pis.source_formula_hash;
  for (std::size_t i : minimal_cover_indices(pis, table)) {
    out.items.push_back(pis.items[i]);
  }
  return out;
}

ImplicantGraph implicant_graph(const Formula& f, const PrimeImplicantSet& pis,
                               const Limits& limits) {
  ImplicantGraph g;
  g.vertices = possible_worlds(f, limits);
  auto index_of = [&](World w) {
    auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), w);
    if (it == g.vertices.end() || *it != w) {
      throw InternalError("prime implicant covers an impossible world");
    }
    return static_cast<std::size_t>(it - g.vertices.begin());
  };
  std::vector<std::size_t> cover;
  for (const auto& pi : pis.items) {
    cover.clear();
    ForEachExtension(pi, f.n(), [&](World w) { cover.push_back(index_of(w)); });
    if (g.edges.size() + cover.size() * (cover.size() - 1) / 2 >
        limits.max_terms) {
      throw LimitExceeded("implicant graph exceeds " +
                          std::to_string(limits.max_terms) + " edges");
    }
    for (std::size_t a = 0; a < cover.size(); ++a) {
      for (std::size_t b = a + 1; b < cover.size(); ++b) {
        g.edges.emplace_back(std::min(cover[a], cover[b]),
                             std::max(cover[a], cover[b]));
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

std::vector<std::vector<std::size_t>> UnionFind::groups() {
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t x = 0; x < parent_.size(); ++x) {
    auto [it, inserted] = slot.emplace(find(x), out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(x);
  }
  return out;  // members ascending, groups ordered by smallest member
}

std::vector<std::vector<std::size_t>> connected_components(
    const ImplicantGraph& g) {
  UnionFind uf(g.vertices.size());
  for (const auto& [a, b] : g.edges) uf.unite(a, b);
  return uf.groups();
}

}  // namespace losscape
