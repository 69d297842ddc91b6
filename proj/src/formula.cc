#include "losscape/formula.h"

#include <bit>
#include <algorithm>
#include <cstdlib>
#include <functional>

namespace losscape {

Limits Limits::FromEnv() {
  Limits limits;
  if (const char* env = std::getenv("LOSSCAPE_MAX_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > kMaxBitVars) {
      throw InvalidArgument(std::string("LOSSCAPE_MAX_N must be an integer in "
                                        "[1, 62], got '") + env + "'");
    }
    limits.max_vars = static_cast<int>(v);
  }
  return limits;
}

void check_enumerable(int n, const Limits& limits) {
  if (n > limits.max_vars || n > kMaxBitVars) {
    throw LimitExceeded(std::to_string(n) +
                        " variables exceed the enumeration limit of " +
                        std::to_string(limits.max_vars));
  }
}

PartialAssignment::PartialAssignment(std::uint64_t bits, std::uint64_t mask)
    : bits(bits), mask(mask) {
  if ((bits & ~mask) != 0) {
    throw InvalidArgument("partial assignment sets unassigned positions");
  }
}

PartialAssignment PartialAssignment::Full(World w, int n) {
  const std::uint64_t all = n >= 64 ? ~std::uint64_t{0}
                                    : (std::uint64_t{1} << n) - 1;
  return PartialAssignment(w.bits & all, all);
}

int PartialAssignment::size() const { return std::popcount(mask); }

std::string PartialAssignment::to_string(int n) const {
  std::string out(static_cast<std::size_t>(n), '-');
  for (int i = 0; i < n; ++i) {
    if (assigns(i)) out[static_cast<std::size_t>(i)] = value(i) ? '1' : '0';
  }
  return out;
}

ExprPtr Expr::Var(int index) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kVar;
  e->var = index;
  return e;
}

ExprPtr Expr::Const(bool value) {
  auto e = std::make_shared<Expr>();
  e->op = value ? Op::kTrue : Op::kFalse;
  return e;
}

ExprPtr Expr::Not(ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kNot;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr Expr::Binary(Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

bool StructurallyEqual(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::kVar: return a.var == b.var;
    case Op::kTrue:
    case Op::kFalse: return true;
    case Op::kNot: return StructurallyEqual(*a.lhs, *b.lhs);
    default:
      return StructurallyEqual(*a.lhs, *b.lhs) &&
             StructurallyEqual(*a.rhs, *b.rhs);
  }
}

namespace {

int MaxVar(const Expr& e) {
  switch (e.op) {
    case Op::kVar: return e.var;
    case Op::kTrue:
    case Op::kFalse: return -1;
    case Op::kNot: return MaxVar(*e.lhs);
    default: return std::max(MaxVar(*e.lhs), MaxVar(*e.rhs));
  }
}

const char* OpText(Op op) {
  switch (op) {
    case Op::kAnd: return " & ";
    case Op::kOr: return " | ";
    case Op::kXor: return " ^ ";
    case Op::kImplies: return " -> ";
    case Op::kIff: return " <-> ";
    default: return "?";
  }
}

void Print(const Expr& e, const std::vector<std::string>& vars,
           std::string& out) {
  switch (e.op) {
    case Op::kVar: out += vars[static_cast<std::size_t>(e.var)]; return;
    case Op::kTrue: out += '1'; return;
    case Op::kFalse: out += '0'; return;
    case Op::kNot:
      out += '!';
      Print(*e.lhs, vars, out);
      return;
    default:
      out += '(';
      Print(*e.lhs, vars, out);
      out += OpText(e.op);
      Print(*e.rhs, vars, out);
      out += ')';
  }
}

}  // namespace

Formula::Formula(ExprPtr root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {
  if (!root_) throw InvalidArgument("formula has no expression");
  if (vars_.empty()) throw InvalidArgument("formula has no variables");
  if (n() > kMaxBitVars) {
    throw LimitExceeded("formula has more than 62 variables");
  }
  if (MaxVar(*root_) >= n()) {
    throw InvalidArgument("expression references an undeclared variable");
  }
}

std::string Formula::to_string() const {
  std::string out;
  Print(*root_, vars_, out);
  return out;
}

std::uint64_t Formula::hash() const {
  // FNV-1a over the canonical text and the variable order.
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(to_string());
  for (const auto& v : vars_) mix(v);
  return h;
}

std::string Formula::world_string(World w) const {
  return PartialAssignment::Full(w, n()).to_string(n());
}

bool eval_expr(const Expr& e, World w) {
  switch (e.op) {
    case Op::kVar: return w.value(e.var);
    case Op::kTrue: return true;
    case Op::kFalse: return false;
    case Op::kNot: return !eval_expr(*e.lhs, w);
    case Op::kAnd: return eval_expr(*e.lhs, w) && eval_expr(*e.rhs, w);
    case Op::kOr: return eval_expr(*e.lhs, w) || eval_expr(*e.rhs, w);
    case Op::kXor: return eval_expr(*e.lhs, w) != eval_expr(*e.rhs, w);
    case Op::kImplies: return !eval_expr(*e.lhs, w) || eval_expr(*e.rhs, w);
    case Op::kIff: return eval_expr(*e.lhs, w) == eval_expr(*e.rhs, w);
  }
  return false;
}

bool eval_world(const Formula& f, World w) { return eval_expr(f.root(), w); }

namespace {

using Words = std::vector<std::uint64_t>;

constexpr std::uint64_t kLowPatterns[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};

Words EvalWords(const Expr& e, std::size_t num_words, std::uint64_t tail) {
  Words out(num_words);
  switch (e.op) {
    case Op::kVar:
      for (std::size_t j = 0; j < num_words; ++j) {
        if (e.var < 6) {
          out[j] = kLowPatterns[e.var];
        } else {
          out[j] = ((j >> (e.var - 6)) & 1u) ? ~std::uint64_t{0} : 0;
        }
      }
      break;
    case Op::kTrue:
      std::fill(out.begin(), out.end(), ~std::uint64_t{0});
      break;
    case Op::kFalse:
      break;
    case Op::kNot: {
      Words a = EvalWords(*e.lhs, num_words, tail);
      for (std::size_t j = 0; j < num_words; ++j) out[j] = ~a[j];
      break;
    }
    default: {
      Words a = EvalWords(*e.lhs, num_words, tail);
      Words b = EvalWords(*e.rhs, num_words, tail);
      for (std::size_t j = 0; j < num_words; ++j) {
        switch (e.op) {
          case Op::kAnd: out[j] = a[j] & b[j]; break;
          case Op::kOr: out[j] = a[j] | b[j]; break;
          case Op::kXor: out[j] = a[j] ^ b[j]; break;
          case Op::kImplies: out[j] = ~a[j] | b[j]; break;
          case Op::kIff: out[j] = ~(a[j] ^ b[j]); break;
          default: break;
        }
      }
    }
  }
  out.back() &= tail;
  return out;
}

}  // namespace

TruthTable::TruthTable(const Formula& f, const Limits& limits) : n_(f.n()) {
  check_enumerable(n_, limits);
  const std::uint64_t worlds = std::uint64_t{1} << n_;
  const std::size_t num_words = worlds >= 64 ? worlds / 64 : 1;
  const std::uint64_t tail =
      worlds >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << worlds) - 1;
  words_ = EvalWords(f.root(), num_words, tail);
}

std::uint64_t TruthTable::count() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

std::vector<World> possible_worlds(const TruthTable& table) {
  std::vector<World> out;
  for (std::uint64_t w = 0; w < table.num_worlds(); ++w) {
    if (table(w)) out.push_back(World{w});
  }
  return out;
}

std::vector<World> possible_worlds(const Formula& f, const Limits& limits) {
  return possible_worlds(TruthTable(f, limits));
}

namespace {

ExprPtr Conjoin(ExprPtr a, ExprPtr b) {
  if (!a) return b;
  return Expr::Binary(Op::kAnd, std::move(a), std::move(b));
}

ExprPtr Disjoin(ExprPtr a, ExprPtr b) {
  if (!a) return b;
  return Expr::Binary(Op::kOr, std::move(a), std::move(b));
}

ExprPtr ExactlyOne(int first, int count) {
  ExprPtr at_least;
  for (int i = 0; i < count; ++i) at_least = Disjoin(at_least, Expr::Var(first + i));
  ExprPtr result = at_least;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      result = Conjoin(result,
                       Expr::Not(Expr::Binary(Op::kAnd, Expr::Var(first + i),
                                              Expr::Var(first + j))));
    }
  }
  return result;
}

}  // namespace

Formula mnist_add_formula(int num_values, int target_sum) {
  if (num_values < 2 || num_values > 10) {
    throw InvalidRange("num_values must be in [2, 10], got " +
                       std::to_string(num_values));
  }
  if (target_sum < 0 || target_sum > 2 * (num_values - 1)) {
    throw InvalidRange("target_sum must be in [0, " +
                       std::to_string(2 * (num_values - 1)) + "], got " +
                       std::to_string(target_sum));
  }
  std::vector<std::string> vars;
  for (int d = 1; d <= 2; ++d) {
    for (int v = 0; v < num_values; ++v) {
      vars.push_back("w" + std::to_string(d) + "_" + std::to_string(v));
    }
  }
  ExprPtr sum;
  for (int j = 0; j < num_values; ++j) {
    const int k = target_sum - j;
    if (k < 0 || k >= num_values) continue;
    sum = Disjoin(sum, Expr::Binary(Op::kAnd, Expr::Var(j),
                                    Expr::Var(num_values + k)));
  }
  ExprPtr root = Conjoin(Conjoin(ExactlyOne(0, num_values),
                                 ExactlyOne(num_values, num_values)),
                         sum);
  return Formula(std::move(root), std::move(vars));
}

}  // namespace losscape
