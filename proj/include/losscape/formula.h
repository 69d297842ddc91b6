#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "losscape/errors.h"

namespace losscape {

// Hard ceiling for bit-pattern indexing; enumeration is further bounded by
// Limits::max_vars.
inline constexpr int kMaxBitVars = 62;

struct Limits {
  // Largest n for which 2^n worlds may be enumerated.
  int max_vars = 20;
  // Abort prime implicant generation above this many primes.
  std::size_t max_prime_implicants = 100000;
  // Working-set cap for the implicant table and the face lattice.
  std::size_t max_terms = 4000000;

  // Defaults, with max_vars overridden by LOSSCAPE_MAX_N when set.
  static Limits FromEnv();
};

// A full assignment. Bit i holds the value of variable i.
struct World {
  std::uint64_t bits = 0;

  bool value(int var) const { return (bits >> var) & 1u; }
  friend auto operator<=>(const World&, const World&) = default;
};

// A partial assignment w_D: `mask` marks the assigned variables (the index
// set D), `bits` their values. Unassigned positions always carry 0.
struct PartialAssignment {
  std::uint64_t bits = 0;
  std::uint64_t mask = 0;

  PartialAssignment() = default;
  PartialAssignment(std::uint64_t bits, std::uint64_t mask);

  static PartialAssignment Full(World w, int n);

  int size() const;  // |D|
  bool assigns(int var) const { return (mask >> var) & 1u; }
  bool value(int var) const { return (bits >> var) & 1u; }

  // True if w agrees with this assignment on every assigned variable.
  bool covers(World w) const { return (w.bits & mask) == bits; }
  // True if every world covered by `other` is covered by this one.
  bool covers(const PartialAssignment& other) const {
    return (other.mask & mask) == mask && (other.bits & mask) == bits;
  }

  // Per-variable '0' / '1' / '-' in variable order.
  std::string to_string(int n) const;

  friend auto operator<=>(const PartialAssignment&,
                          const PartialAssignment&) = default;
};

enum class Op { kVar, kTrue, kFalse, kNot, kAnd, kOr, kXor, kImplies, kIff };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::kFalse;
  int var = -1;        // kVar only
  ExprPtr lhs, rhs;    // kNot uses lhs only

  static ExprPtr Var(int index);
  static ExprPtr Const(bool value);
  static ExprPtr Not(ExprPtr operand);
  static ExprPtr Binary(Op op, ExprPtr lhs, ExprPtr rhs);
};

bool StructurallyEqual(const Expr& a, const Expr& b);

class Formula {
 public:
  Formula(ExprPtr root, std::vector<std::string> vars);

  const Expr& root() const { return *root_; }
  const ExprPtr& root_ptr() const { return root_; }
  const std::vector<std::string>& vars() const { return vars_; }
  int n() const { return static_cast<int>(vars_.size()); }

  // Fully parenthesized text that parses back to an equal tree.
  std::string to_string() const;
  // Stable 64-bit digest over the tree and the variable order.
  std::uint64_t hash() const;

  std::string world_string(World w) const;

 private:
  ExprPtr root_;
  std::vector<std::string> vars_;
};

Formula parse(std::string_view text,
              const std::optional<std::vector<std::string>>& var_order = {});

bool eval_world(const Formula& f, World w);
bool eval_expr(const Expr& e, World w);

// Satisfying-world bitmap over all 2^n worlds, evaluated 64 worlds at a time.
class TruthTable {
 public:
  explicit TruthTable(const Formula& f, const Limits& limits = {});

  int n() const { return n_; }
  std::uint64_t num_worlds() const { return std::uint64_t{1} << n_; }
  bool operator()(World w) const {
    return (words_[w.bits >> 6] >> (w.bits & 63)) & 1u;
  }
  bool operator()(std::uint64_t bits) const { return (*this)(World{bits}); }
  std::uint64_t count() const;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

// Ascending bit-pattern order; may be empty.
std::vector<World> possible_worlds(const Formula& f, const Limits& limits = {});
std::vector<World> possible_worlds(const TruthTable& table);

// Two-digit MNIST-addition constraint with `num_values` classes per digit:
// exactly one class per digit and digit1 + digit2 == target_sum.
Formula mnist_add_formula(int num_values, int target_sum);

void check_enumerable(int n, const Limits& limits);

}  // namespace losscape
