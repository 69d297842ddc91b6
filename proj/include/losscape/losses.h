#pragma once

#include <string>
#include <vector>

#include "losscape/distributions.h"
#include "losscape/formula.h"

namespace losscape {

enum class LossKind { kSemantic, kSemanticEntropy, kFuzzy };
enum class FuzzyLogic { kProduct, kGoedel, kLukasiewicz };
enum class FuzzyForm { kOneMinus, kNegLog };

// Regularizer R in (1 - alpha) L + alpha R.
//   kCrossEntropy: -(1/|W_phi|) sum_{w in W_phi} log p(w)
//   kPaperLiteral: -(1/|W_phi|) sum_{w in W_phi} p(w)
enum class EntropyVariant { kCrossEntropy, kPaperLiteral };

inline constexpr double kFuzzyClamp = 1e-12;

struct LossSpec {
  LossKind kind = LossKind::kSemantic;
  double alpha = 0.0;
  EntropyVariant variant = EntropyVariant::kCrossEntropy;
  FuzzyLogic logic = FuzzyLogic::kProduct;
  FuzzyForm form = FuzzyForm::kOneMinus;

  static LossSpec Semantic();
  static LossSpec SemanticEntropy(
      double alpha, EntropyVariant variant = EntropyVariant::kCrossEntropy);
  static LossSpec Fuzzy(FuzzyLogic logic, FuzzyForm form);

  // Throws InvalidArgument on alpha outside [0, 1].
  void validate() const;
  // Short tag used in CSV output: "semantic", "semantic_entropy",
  // "fuzzy_product_neg_log", ...
  std::string name() const;
};

std::string to_string(FuzzyLogic logic);
std::string to_string(FuzzyForm form);
std::string to_string(EntropyVariant variant);
FuzzyLogic parse_fuzzy_logic(const std::string& text);
FuzzyForm parse_fuzzy_form(const std::string& text);
EntropyVariant parse_entropy_variant(const std::string& text);

// -log WMC; +infinity when WMC is 0.
double semantic_loss(const TruthTable& table, const DenseDistribution& p);
double semantic_loss(const Formula& f, const DenseDistribution& p,
                     const Limits& limits = {});

// dL/dmu_i = -(WMC|mu_i=1 - WMC|mu_i=0) / WMC. Requires WMC > 0.
std::vector<double> semantic_grad_mu(const TruthTable& table,
                                     const IndependentParams& mu);
std::vector<double> semantic_grad_mu(const Formula& f,
                                     const IndependentParams& mu,
                                     const Limits& limits = {});

double entropy_reg_loss(const TruthTable& table, const DenseDistribution& p,
                        double alpha,
                        EntropyVariant variant = EntropyVariant::kCrossEntropy);
double entropy_reg_loss(const Formula& f, const DenseDistribution& p,
                        double alpha,
                        EntropyVariant variant = EntropyVariant::kCrossEntropy,
                        const Limits& limits = {});

// Value of a semantic or entropy-regularized loss together with its gradient
// with respect to every world probability. Fuzzy specs are rejected.
struct DenseLossGrad {
  double value = 0.0;
  std::vector<double> grad;
};
DenseLossGrad dense_loss_grad(const TruthTable& table,
                              const DenseDistribution& p, const LossSpec& spec);
double dense_loss(const TruthTable& table, const DenseDistribution& p,
                  const LossSpec& spec);

double fuzzy_value(const Formula& f, const IndependentParams& mu,
                   FuzzyLogic logic);
double fuzzy_loss(const Formula& f, const IndependentParams& mu,
                  FuzzyLogic logic, FuzzyForm form);
// Exact derivative of fuzzy_loss along each mu_i, taking the branch selected
// at mu wherever min/max are involved.
std::vector<double> fuzzy_grad_mu(const Formula& f, const IndependentParams& mu,
                                  FuzzyLogic logic, FuzzyForm form);

}  // namespace losscape
