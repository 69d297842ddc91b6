#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "losscape/formula.h"

namespace losscape {

bool is_implicant(const TruthTable& table, const PartialAssignment& pa);
// Evaluates the formula directly on each of the 2^(n-|D|) extensions.
bool is_implicant(const Formula& f, const PartialAssignment& pa,
                  const Limits& limits = {});

// Sorted by |D| ascending, then (mask, bits) ascending.
bool ImplicantOrder(const PartialAssignment& a, const PartialAssignment& b);

struct PrimeImplicantSet {
  std::vector<PartialAssignment> items;
  std::uint64_t source_formula_hash = 0;
  int n = 0;

  std::size_t size() const { return items.size(); }
};

// Quine-McCluskey merging over (bits, mask) terms.
PrimeImplicantSet prime_implicants(const Formula& f, const Limits& limits = {});
PrimeImplicantSet prime_implicants(const Formula& f, const TruthTable& table,
                                   const Limits& limits = {});

enum class CoverMethod { kAuto, kPetrick, kBranchAndBound };

// Minimum-cardinality subset of `pis` whose covers union to the possible
// worlds. Among minimum covers the lexicographically smallest index set
// (in PrimeImplicantSet order) wins. Returns indices into pis.items.
std::vector<std::size_t> minimal_cover_indices(
    const PrimeImplicantSet& pis, const TruthTable& table,
    CoverMethod method = CoverMethod::kAuto);

PrimeImplicantSet minimal_cover(const PrimeImplicantSet& pis, const Formula& f,
                                const Limits& limits = {});

struct ImplicantGraph {
  std::vector<World> vertices;                              // ascending
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, sorted
};

ImplicantGraph implicant_graph(const Formula& f, const PrimeImplicantSet& pis,
                               const Limits& limits = {});

// Partition of vertex indices, each sorted, components ordered by smallest
// member.
std::vector<std::vector<std::size_t>> connected_components(
    const ImplicantGraph& g);

// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::vector<std::vector<std::size_t>> groups();

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace losscape
