#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "losscape/cli/verify.h"
#include "losscape/formula.h"

namespace losscape {
namespace {

// Truth-table oracle evaluated straight from the AST with plain recursion,
// independent of the bit-parallel evaluator.
bool Oracle(const Expr& e, std::uint64_t w) {
  switch (e.op) {
    case Op::kVar: return (w >> e.var) & 1u;
    case Op::kTrue: return true;
    case Op::kFalse: return false;
    case Op::kNot: return !Oracle(*e.lhs, w);
    case Op::kAnd: return Oracle(*e.lhs, w) && Oracle(*e.rhs, w);
    case Op::kOr: return Oracle(*e.lhs, w) || Oracle(*e.rhs, w);
    case Op::kXor: return Oracle(*e.lhs, w) ^ Oracle(*e.rhs, w);
    case Op::kImplies: return !Oracle(*e.lhs, w) || Oracle(*e.rhs, w);
    case Op::kIff: return Oracle(*e.lhs, w) == Oracle(*e.rhs, w);
  }
  return false;
}

TEST(Parse, TrafficLight) {
  const Formula f = parse("!r | !g");
  EXPECT_EQ(f.n(), 2);
  EXPECT_EQ(f.vars(), (std::vector<std::string>{"r", "g"}));
}

TEST(Parse, Xor) {
  const Formula f = parse("(a & !b) | (!a & b)");
  EXPECT_EQ(f.n(), 2);
  EXPECT_EQ(possible_worlds(f), (std::vector<World>{{1}, {2}}));
}

TEST(Parse, SyntaxErrorOffset) {
  try {
    parse("a & (b |");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 8u);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, ErrorsOnBadInput) {
  EXPECT_THROW(parse("a b"), SyntaxError);
  EXPECT_THROW(parse(")"), SyntaxError);
  EXPECT_THROW(parse("1 & 0"), SyntaxError);  // no variables
  EXPECT_THROW(parse("a & 9b"), SyntaxError);
  EXPECT_THROW(parse("a & b", std::vector<std::string>{"a"}), UnknownVariable);
  EXPECT_THROW(parse("a", std::vector<std::string>{"a", "a"}), InvalidArgument);
}

TEST(Parse, VarOrderOverride) {
  const Formula f = parse("a & !b", std::vector<std::string>{"b", "a"});
  EXPECT_EQ(f.vars(), (std::vector<std::string>{"b", "a"}));
  // Only a=1, b=0 satisfies: bit 1 is a.
  EXPECT_EQ(possible_worlds(f), (std::vector<World>{{2}}));
}

TEST(Parse, Precedence) {
  // ! > & > ^ > | > -> > <->
  const Formula f = parse("a | b & c");
  EXPECT_EQ(f.to_string(), "(a | (b & c))");
  EXPECT_EQ(parse("a ^ b | c").to_string(), "((a ^ b) | c)");
  EXPECT_EQ(parse("a & b ^ c").to_string(), "((a & b) ^ c)");
  EXPECT_EQ(parse("a -> b -> c").to_string(), "(a -> (b -> c))");
  EXPECT_EQ(parse("a <-> b -> c").to_string(), "(a <-> (b -> c))");
  EXPECT_EQ(parse("!!a").to_string(), "!!a");
}

TEST(Eval, TrafficWorlds) {
  const Formula f = parse("!r | !g");
  EXPECT_FALSE(eval_world(f, World{3}));
  EXPECT_TRUE(eval_world(f, World{0}));
  EXPECT_EQ(possible_worlds(f), (std::vector<World>{{0}, {1}, {2}}));
}

TEST(Eval, Tautology) {
  const Formula f = parse("a <-> a");
  for (std::uint64_t w = 0; w < 2; ++w) EXPECT_TRUE(eval_world(f, World{w}));
}

TEST(Eval, Contradiction) { EXPECT_TRUE(possible_worlds(parse("a & !a")).empty()); }

TEST(Eval, ConstantsAndConnectives) {
  const Formula f = parse("(a -> 0) <-> !a");
  EXPECT_EQ(possible_worlds(f).size(), 2u);
  EXPECT_EQ(possible_worlds(parse("a ^ 1")), (std::vector<World>{{0}}));
}

TEST(Eval, DifferentialAgainstAstOracle) {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 300; ++c) {
    const Formula f = cli::random_formula(rng, 8);
    const TruthTable table(f);
    for (std::uint64_t w = 0; w < table.num_worlds(); ++w) {
      const bool expected = Oracle(f.root(), w);
      ASSERT_EQ(eval_world(f, World{w}), expected) << f.to_string();
      ASSERT_EQ(table(w), expected) << f.to_string();
    }
  }
}

TEST(Eval, WideTableMatchesOracle) {
  // Crosses the 64-world word boundary.
  const Formula f = parse("(a ^ b ^ c) | (d & e & !f & g) | (h -> a)");
  const TruthTable table(f);
  ASSERT_EQ(table.num_worlds(), 256u);
  std::uint64_t count = 0;
  for (std::uint64_t w = 0; w < 256; ++w) {
    EXPECT_EQ(table(w), Oracle(f.root(), w));
    count += Oracle(f.root(), w);
  }
  EXPECT_EQ(table.count(), count);
}

TEST(Print, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 200; ++c) {
    const Formula f = cli::random_formula(rng, 6);
    const Formula g = parse(f.to_string(), f.vars());
    EXPECT_TRUE(StructurallyEqual(f.root(), g.root())) << f.to_string();
    EXPECT_EQ(f.hash(), g.hash());
  }
  for (const char* text : {"a -> b <-> !c ^ d", "!(a | 0) & 1 & b", "x_1 <-> (y2 -> x_1)"}) {
    const Formula f = parse(text);
    EXPECT_TRUE(StructurallyEqual(f.root(), parse(f.to_string(), f.vars()).root()));
  }
}

TEST(MnistAdd, ThreeValuesSumTwo) {
  const Formula f = mnist_add_formula(3, 2);
  EXPECT_EQ(f.n(), 6);
  EXPECT_EQ(f.vars().front(), "w1_0");
  // Brute force: one-hot digit pairs (j, k) with j + k == 2.
  std::vector<World> expected;
  for (std::uint64_t w = 0; w < 64; ++w) {
    const std::uint64_t d1 = w & 7, d2 = w >> 3;
    if (std::popcount(d1) != 1 || std::popcount(d2) != 1) continue;
    if (std::countr_zero(d1) + std::countr_zero(d2) == 2) expected.push_back(World{w});
  }
  EXPECT_EQ(expected.size(), 3u);
  EXPECT_EQ(possible_worlds(f), expected);
}

TEST(MnistAdd, UniqueDecomposition) {
  EXPECT_EQ(possible_worlds(mnist_add_formula(2, 0)).size(), 1u);
  EXPECT_EQ(possible_worlds(mnist_add_formula(2, 0)).front().bits, 0b0101u);
}

TEST(MnistAdd, Ranges) {
  EXPECT_THROW(mnist_add_formula(3, 5), InvalidRange);
  EXPECT_THROW(mnist_add_formula(1, 0), InvalidRange);
  EXPECT_THROW(mnist_add_formula(11, 0), InvalidRange);
  EXPECT_THROW(mnist_add_formula(3, -1), InvalidRange);
}

TEST(Limits, EnumerationCap) {
  Limits limits;
  limits.max_vars = 4;
  const Formula f = parse("a & b & c & d & e");
  EXPECT_THROW(TruthTable(f, limits), LimitExceeded);
  EXPECT_THROW(possible_worlds(f, limits), LimitExceeded);
}

TEST(PartialAssignment, Invariants) {
  EXPECT_THROW(PartialAssignment(0b10, 0b01), InvalidArgument);
  const PartialAssignment pa(0b01, 0b11);
  EXPECT_EQ(pa.size(), 2);
  EXPECT_TRUE(pa.covers(World{0b01}));
  EXPECT_FALSE(pa.covers(World{0b11}));
  EXPECT_EQ(PartialAssignment(0, 0b01).to_string(2), "0-");
}

}  // namespace
}  // namespace losscape
