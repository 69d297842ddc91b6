#include "losscape/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace losscape {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t PossibleCount(const TruthTable& table) {
  return static_cast<std::size_t>(table.count());
}

// Forward-mode dual number carrying the derivative along every mu_i.
struct Dual {
  double v = 0.0;
  std::vector<double> d;
};

Dual Constant(double v, std::size_t n) { return {v, std::vector<double>(n, 0.0)}; }

Dual Affine(double a, const Dual& x, double b, const Dual& y, double c) {
  Dual out{a * x.v + b * y.v + c, std::vector<double>(x.d.size())};
  for (std::size_t i = 0; i < x.d.size(); ++i) out.d[i] = a * x.d[i] + b * y.d[i];
  return out;
}

Dual Product(const Dual& x, const Dual& y) {
  Dual out{x.v * y.v, std::vector<double>(x.d.size())};
  for (std::size_t i = 0; i < x.d.size(); ++i) out.d[i] = x.d[i] * y.v + x.v * y.d[i];
  return out;
}

// Scalar operations shared by the plain and the dual evaluators.
struct Plain {
  using T = double;
  std::span<const double> mu;
  T var(int i) const { return mu[static_cast<std::size_t>(i)]; }
  T constant(double v) const { return v; }
  T neg(T a) const { return 1.0 - a; }
  T mul(T a, T b) const { return a * b; }
  T prob_or(T a, T b) const { return a + b - a * b; }
  T min(T a, T b) const { return a <= b ? a : b; }
  T max(T a, T b) const { return a >= b ? a : b; }
  T luk_and(T a, T b) const { return std::max(0.0, a + b - 1.0); }
  T luk_or(T a, T b) const { return std::min(1.0, a + b); }
};

struct Forward {
  using T = Dual;
  std::span<const double> mu;
  T var(int i) const {
    Dual x = Constant(mu[static_cast<std::size_t>(i)], mu.size());
    x.d[static_cast<std::size_t>(i)] = 1.0;
    return x;
  }
  T constant(double v) const { return Constant(v, mu.size()); }
  T neg(const T& a) const { return Affine(-1.0, a, 0.0, a, 1.0); }
  T mul(const T& a, const T& b) const { return Product(a, b); }
  T prob_or(const T& a, const T& b) const {
    const Dual ab = Product(a, b);
    return Affine(1.0, Affine(1.0, a, 1.0, b, 0.0), -1.0, ab, 0.0);
  }
  T min(const T& a, const T& b) const { return a.v <= b.v ? a : b; }
  T max(const T& a, const T& b) const { return a.v >= b.v ? a : b; }
  T luk_and(const T& a, const T& b) const {
    return a.v + b.v - 1.0 > 0.0 ? Affine(1.0, a, 1.0, b, -1.0)
                                 : constant(0.0);
  }
  T luk_or(const T& a, const T& b) const {
    return a.v + b.v < 1.0 ? Affine(1.0, a, 1.0, b, 0.0) : constant(1.0);
  }
};

template <typename Ops>
class FuzzyEvaluator {
 public:
  using T = typename Ops::T;
  FuzzyEvaluator(Ops ops, FuzzyLogic logic) : ops_(std::move(ops)), logic_(logic) {}

  T eval(const Expr& e) const {
    switch (e.op) {
      case Op::kVar: return ops_.var(e.var);
      case Op::kTrue: return ops_.constant(1.0);
      case Op::kFalse: return ops_.constant(0.0);
      case Op::kNot: return ops_.neg(eval(*e.lhs));
      case Op::kAnd: return And(eval(*e.lhs), eval(*e.rhs));
      case Op::kOr: return Or(eval(*e.lhs), eval(*e.rhs));
      case Op::kImplies: return Or(ops_.neg(eval(*e.lhs)), eval(*e.rhs));
      case Op::kIff: {
        const T a = eval(*e.lhs), b = eval(*e.rhs);
        return And(Or(ops_.neg(a), b), Or(ops_.neg(b), a));
      }
      case Op::kXor: {
        const T a = eval(*e.lhs), b = eval(*e.rhs);
        return And(Or(a, b), ops_.neg(And(a, b)));
      }
    }
    throw InternalError("unknown operator");
  }

 private:
  T And(const T& a, const T& b) const {
    switch (logic_) {
      case FuzzyLogic::kProduct: return ops_.mul(a, b);
      case FuzzyLogic::kGoedel: return ops_.min(a, b);
      case FuzzyLogic::kLukasiewicz: return ops_.luk_and(a, b);
    }
    throw InternalError("unknown logic");
  }
  T Or(const T& a, const T& b) const {
    switch (logic_) {
      case FuzzyLogic::kProduct: return ops_.prob_or(a, b);
      case FuzzyLogic::kGoedel: return ops_.max(a, b);
      case FuzzyLogic::kLukasiewicz: return ops_.luk_or(a, b);
    }
    throw InternalError("unknown logic");
  }

  Ops ops_;
  FuzzyLogic logic_;
};

void CheckDims(const Formula& f, const IndependentParams& mu) {
  if (mu.n() != f.n()) throw InvalidArgument("parameter dimension mismatch");
}

void CheckDims(const TruthTable& table, const DenseDistribution& p) {
  if (p.probs.size() != table.num_worlds()) {
    throw InvalidArgument("distribution and formula differ in dimension");
  }
}

}  // namespace

LossSpec LossSpec::Semantic() { return {}; }

LossSpec LossSpec::SemanticEntropy(double alpha, EntropyVariant variant) {
  LossSpec s;
  s.kind = LossKind::kSemanticEntropy;
  s.alpha = alpha;
  s.variant = variant;
  s.validate();
  return s;
}

LossSpec LossSpec::Fuzzy(FuzzyLogic logic, FuzzyForm form) {
  LossSpec s;
  s.kind = LossKind::kFuzzy;
  s.logic = logic;
  s.form = form;
  return s;
}

void LossSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("alpha must lie in [0, 1]");
  }
}

std::string LossSpec::name() const {
  switch (kind) {
    case LossKind::kSemantic: return "semantic";
    case LossKind::kSemanticEntropy: return "semantic_entropy";
    case LossKind::kFuzzy:
      return "fuzzy_" + to_string(logic) + "_" + to_string(form);
  }
  return "unknown";
}

std::string to_string(FuzzyLogic logic) {
  switch (logic) {
    case FuzzyLogic::kProduct: return "product";
    case FuzzyLogic::kGoedel: return "goedel";
    case FuzzyLogic::kLukasiewicz: return "lukasiewicz";
  }
  return "unknown";
}

std::string to_string(FuzzyForm form) {
  return form == FuzzyForm::kOneMinus ? "one_minus" : "neg_log";
}

std::string to_string(EntropyVariant variant) {
  return variant == EntropyVariant::kCrossEntropy ? "cross_entropy"
                                                  : "paper_literal";
}

FuzzyLogic parse_fuzzy_logic(const std::string& text) {
  if (text == "product") return FuzzyLogic::kProduct;
  if (text == "goedel" || text == "godel") return FuzzyLogic::kGoedel;
  if (text == "lukasiewicz" || text == "luk") return FuzzyLogic::kLukasiewicz;
  throw InvalidArgument("unknown fuzzy logic '" + text + "'");
}

FuzzyForm parse_fuzzy_form(const std::string& text) {
  if (text == "one_minus" || text == "one-minus") return FuzzyForm::kOneMinus;
  if (text == "neg_log" || text == "neg-log") return FuzzyForm::kNegLog;
  throw InvalidArgument("unknown fuzzy loss form '" + text + "'");
}

EntropyVariant parse_entropy_variant(const std::string& text) {
  if (text == "cross_entropy" || text == "cross-entropy") {
    return EntropyVariant::kCrossEntropy;
  }
  if (text == "paper_literal" || text == "paper-literal" || text == "literal") {
    return EntropyVariant::kPaperLiteral;
  }
  throw InvalidArgument("unknown entropy variant '" + text + "'");
}

double semantic_loss(const TruthTable& table, const DenseDistribution& p) {
  const double z = std::min(wmc(table, p), 1.0);
  return z > 0.0 ? -std::log(z) : kInf;
}

double semantic_loss(const Formula& f, const DenseDistribution& p,
                     const Limits& limits) {
  return semantic_loss(TruthTable(f, limits), p);
}

std::vector<double> semantic_grad_mu(const TruthTable& table,
                                     const IndependentParams& mu) {
  if (mu.n() != table.n()) throw InvalidArgument("parameter dimension mismatch");
  const double z = wmc(table, densify(mu));
  if (!(z > 0.0)) throw InvalidArgument("semantic loss gradient needs WMC > 0");
  std::vector<double> grad(mu.mu.size());
  for (std::size_t i = 0; i < mu.mu.size(); ++i) {
    IndependentParams pinned = mu;
    pinned.mu[i] = 1.0;
    const double hi = wmc(table, densify(pinned));
    pinned.mu[i] = 0.0;
    const double lo = wmc(table, densify(pinned));
    grad[i] = -(hi - lo) / z;
  }
  return grad;
}

std::vector<double> semantic_grad_mu(const Formula& f,
                                     const IndependentParams& mu,
                                     const Limits& limits) {
  return semantic_grad_mu(TruthTable(f, limits), mu);
}

double entropy_reg_loss(const TruthTable& table, const DenseDistribution& p,
                        double alpha, EntropyVariant variant) {
  LossSpec spec = LossSpec::SemanticEntropy(alpha, variant);
  return dense_loss(table, p, spec);
}

double entropy_reg_loss(const Formula& f, const DenseDistribution& p,
                        double alpha, EntropyVariant variant,
                        const Limits& limits) {
  return entropy_reg_loss(TruthTable(f, limits), p, alpha, variant);
}

double dense_loss(const TruthTable& table, const DenseDistribution& p,
                  const LossSpec& spec) {
  CheckDims(table, p);
  spec.validate();
  if (spec.kind == LossKind::kFuzzy) {
    throw InvalidArgument("fuzzy losses are defined on independent parameters");
  }
  const double sl = semantic_loss(table, p);
  if (spec.kind == LossKind::kSemantic || spec.alpha == 0.0) return sl;

  const double inv = 1.0 / static_cast<double>(PossibleCount(table));
  double reg = 0.0;
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    if (!table(w)) continue;
    if (spec.variant == EntropyVariant::kCrossEntropy) {
      reg -= p.probs[w] > 0.0 ? inv * std::log(p.probs[w]) : -kInf;
    } else {
      reg -= inv * p.probs[w];
    }
  }
  if (spec.alpha == 1.0) return reg;
  return (1.0 - spec.alpha) * sl + spec.alpha * reg;
}

DenseLossGrad dense_loss_grad(const TruthTable& table,
                              const DenseDistribution& p, const LossSpec& spec) {
  DenseLossGrad out;
  out.value = dense_loss(table, p, spec);
  out.grad.assign(p.probs.size(), 0.0);
  const double z = wmc(table, p);
  const double w_sem =
      spec.kind == LossKind::kSemantic ? 1.0 : 1.0 - spec.alpha;
  const double w_reg = spec.kind == LossKind::kSemantic ? 0.0 : spec.alpha;
  const double inv = 1.0 / static_cast<double>(PossibleCount(table));
  for (std::size_t w = 0; w < p.probs.size(); ++w) {
    if (!table(w)) continue;
    double g = 0.0;
    if (w_sem > 0.0) g -= w_sem / z;
    if (w_reg > 0.0) {
      g -= spec.variant == EntropyVariant::kCrossEntropy
               ? w_reg * inv / p.probs[w]
               : w_reg * inv;
    }
    out.grad[w] = g;
  }
  return out;
}

double fuzzy_value(const Formula& f, const IndependentParams& mu,
                   FuzzyLogic logic) {
  CheckDims(f, mu);
  return FuzzyEvaluator<Plain>(Plain{mu.mu}, logic).eval(f.root());
}

double fuzzy_loss(const Formula& f, const IndependentParams& mu,
                  FuzzyLogic logic, FuzzyForm form) {
  const double v = fuzzy_value(f, mu, logic);
  if (form == FuzzyForm::kOneMinus) return 1.0 - v;
  return -std::log(std::max(v, kFuzzyClamp));
}

std::vector<double> fuzzy_grad_mu(const Formula& f, const IndependentParams& mu,
                                  FuzzyLogic logic, FuzzyForm form) {
  CheckDims(f, mu);
  const Dual v = FuzzyEvaluator<Forward>(Forward{mu.mu}, logic).eval(f.root());
  std::vector<double> grad(mu.mu.size(), 0.0);
  if (form == FuzzyForm::kNegLog && v.v < kFuzzyClamp) return grad;
  const double scale = form == FuzzyForm::kOneMinus ? -1.0 : -1.0 / v.v;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = scale * v.d[i];
  return grad;
}

}  // namespace losscape
