// Exact minimum set cover over prime implicants.
//
// Two independent routes: Petrick's product-of-sums expansion with absorption
// (up to 24 implicants) and an iterative-deepening branch and bound that
// enumerates index sets in lexicographic order. Both return the
// lexicographically smallest minimum cover.

#include <algorithm>
#include <bit>
#include <vector>

#include "losscape/implicants.h"

namespace losscape {
namespace {

constexpr std::size_t kPetrickMaxImplicants = 24;
constexpr std::size_t kPetrickMaxTerms = 200000;

class Bitset {
 public:
  explicit Bitset(std::size_t n = 0) : n_(n), words_((n + 63) / 64) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool all() const { return count() == n_; }
  // True if `other` contributes at least one bit not present here.
  bool adds(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (other.words_[i] & ~words_[i]) return true;
    }
    return false;
  }
  Bitset operator|(const Bitset& other) const {
    Bitset out(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] |= other.words_[i];
    return out;
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

struct CoverInstance {
  std::vector<World> worlds;
  std::vector<Bitset> covers;              // per implicant, over worlds
  std::vector<std::size_t> max_coverer;    // per world, largest covering index
};

CoverInstance BuildInstance(const PrimeImplicantSet& pis,
                            const TruthTable& table) {
  CoverInstance inst;
  inst.worlds = possible_worlds(table);
  const std::size_t w = inst.worlds.size();
  inst.covers.assign(pis.items.size(), Bitset(w));
  inst.max_coverer.assign(w, 0);
  std::vector<bool> covered(w, false);
  for (std::size_t j = 0; j < pis.items.size(); ++j) {
    for (std::size_t i = 0; i < w; ++i) {
      if (pis.items[j].covers(inst.worlds[i])) {
        inst.covers[j].set(i);
        inst.max_coverer[i] = j;
        covered[i] = true;
      }
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    throw InvalidArgument("implicants do not cover every possible world");
  }
  return inst;
}

// Lexicographic order on index sets of equal size encoded as bit masks.
bool LexLess(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  return diff != 0 && (a & diff & (~diff + 1)) != 0;
}

bool Petrick(const CoverInstance& inst, std::vector<std::size_t>& out) {
  std::vector<std::uint64_t> clauses;
  for (std::size_t i = 0; i < inst.worlds.size(); ++i) {
    std::uint64_t clause = 0;
    for (std::size_t j = 0; j < inst.covers.size(); ++j) {
      if (inst.covers[j].test(i)) clause |= std::uint64_t{1} << j;
    }
    clauses.push_back(clause);
  }
  std::sort(clauses.begin(), clauses.end(), [](auto a, auto b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());

  std::vector<std::uint64_t> terms{0};
  for (std::uint64_t clause : clauses) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t t : terms) {
      if (t & clause) {
        next.push_back(t);
        continue;
      }
      for (std::uint64_t rest = clause; rest != 0; rest &= rest - 1) {
        next.push_back(t | (rest & (~rest + 1)));
      }
    }
    // Absorption: drop any product that is a superset of another.
    std::sort(next.begin(), next.end(), [](auto a, auto b) {
      const int pa = std::popcount(a), pb = std::popcount(b);
      return pa != pb ? pa < pb : a < b;
    });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    terms.clear();
    for (std::uint64_t t : next) {
      bool absorbed = false;
      for (std::uint64_t kept : terms) {
        if ((kept & t) == kept) {
          absorbed = true;
          break;
        }
      }
      if (!absorbed) terms.push_back(t);
    }
    if (terms.size() > kPetrickMaxTerms) return false;
  }

  std::uint64_t best = terms.front();
  for (std::uint64_t t : terms) {
    const int pt = std::popcount(t), pb = std::popcount(best);
    if (pt < pb || (pt == pb && LexLess(t, best))) best = t;
  }
  out.clear();
  for (std::uint64_t rest = best; rest != 0; rest &= rest - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  return true;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const CoverInstance& inst) : inst_(inst) {
    const std::size_t m = inst.covers.size();
    suffix_max_.assign(m + 1, 0);
    for (std::size_t j = m; j-- > 0;) {
      suffix_max_[j] = std::max(suffix_max_[j + 1], inst.covers[j].count());
    }
  }

  std::vector<std::size_t> Solve() {
    const std::size_t w = inst_.worlds.size();
    const std::size_t widest = std::max<std::size_t>(suffix_max_[0], 1);
    for (std::size_t k = std::max<std::size_t>(1, (w + widest - 1) / widest);
         k <= inst_.covers.size(); ++k) {
      chosen_.clear();
      if (Dfs(0, k, Bitset(w))) return chosen_;
    }
    throw InternalError("set cover search exhausted without a cover");
  }

 private:
  bool Dfs(std::size_t next, std::size_t slots, const Bitset& covered) {
    if (covered.all()) return true;
    if (slots == 0 || next >= inst_.covers.size()) return false;
    const std::size_t uncovered = covered.size() - covered.count();
    if (uncovered > slots * suffix_max_[next]) return false;
    for (std::size_t i = 0; i < covered.size(); ++i) {
      if (!covered.test(i) && inst_.max_coverer[i] < next) return false;
    }
    for (std::size_t j = next; j < inst_.covers.size(); ++j) {
      if (!covered.adds(inst_.covers[j])) continue;
      chosen_.push_back(j);
      if (Dfs(j + 1, slots - 1, covered | inst_.covers[j])) return true;
      chosen_.pop_back();
    }
    return false;
  }

  const CoverInstance& inst_;
  std::vector<std::size_t> suffix_max_;
  std::vector<std::size_t> chosen_;
};

}  // namespace

std::vector<std::size_t> minimal_cover_indices(const PrimeImplicantSet& pis,
                                               const TruthTable& table,
                                               CoverMethod method) {
  if (pis.items.empty()) throw Unsatisfiable("empty prime implicant set");
  const CoverInstance inst = BuildInstance(pis, table);
  std::vector<std::size_t> out;
  const bool petrick_fits = pis.items.size() <= kPetrickMaxImplicants;
  if (method == CoverMethod::kPetrick && !petrick_fits) {
    throw InvalidArgument("Petrick's method is limited to 24 implicants");
  }
  if (method != CoverMethod::kBranchAndBound && petrick_fits &&
      Petrick(inst, out)) {
    return out;
  }
  if (method == CoverMethod::kPetrick) {
    throw LimitExceeded("Petrick expansion exceeded its term budget");
  }
  return BranchAndBound(inst).Solve();
}

}  // namespace losscape
