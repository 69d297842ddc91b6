#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "losscape/cubical.h"
#include "losscape/formula.h"
#include "losscape/implicants.h"

namespace losscape {

// mu[i] is the probability that variable i is true.
struct IndependentParams {
  std::vector<double> mu;

  IndependentParams() = default;
  explicit IndependentParams(std::vector<double> mu);
  int n() const { return static_cast<int>(mu.size()); }
};

// Probabilities indexed by world bit pattern.
struct DenseDistribution {
  std::vector<double> probs;

  DenseDistribution() = default;
  explicit DenseDistribution(std::vector<double> probs);
  int n() const;
  double operator[](std::uint64_t w) const { return probs[w]; }
};

struct MixtureParams {
  std::vector<double> alpha;
  std::vector<IndependentParams> components;

  MixtureParams() = default;
  MixtureParams(std::vector<double> alpha,
                std::vector<IndependentParams> components);
  std::size_t k() const { return alpha.size(); }
  int n() const { return components.empty() ? 0 : components.front().n(); }
};

DenseDistribution densify(const IndependentParams& p, const Limits& limits = {});
DenseDistribution densify(const MixtureParams& m, const Limits& limits = {});

// Header "world_bits,probability"; one row per world in index order.
void write_dense_csv(std::ostream& out, const DenseDistribution& p);

// Per-variable marginals P(w_i = 1).
IndependentParams marginals(const DenseDistribution& p);

double wmc(const TruthTable& table, const DenseDistribution& p);
double wmc(const Formula& f, const DenseDistribution& p,
           const Limits& limits = {});

// Assigns round(mu_i) where mu_i is within eps of 0 or 1.
PartialAssignment deterministic_assignment(const IndependentParams& p,
                                           double eps = kDeterministicEps);

bool is_possible(const TruthTable& table, const IndependentParams& p,
                 double eps = kDeterministicEps);
bool is_possible(const Formula& f, const IndependentParams& p,
                 const Limits& limits = {});

DenseDistribution condition(const TruthTable& table, const DenseDistribution& p);
DenseDistribution condition(const Formula& f, const DenseDistribution& p,
                            const Limits& limits = {});

// True if some implicant w_D satisfies w_E, phi |= w_D, where w_E is the
// exact deterministic assignment of p. Decided by enumerating cover(w_E).
bool conditional_entails_implicant(const TruthTable& table,
                                   const PartialAssignment& evidence);

// The conditioned distribution's independent representative, if one exists.
std::optional<IndependentParams> representable_conditional(
    const TruthTable& table, const IndependentParams& p);
std::optional<IndependentParams> representable_conditional(
    const Formula& f, const IndependentParams& p, const Limits& limits = {});

// Worlds with positive mixture probability, from the covers of the
// positive-weight components' exact deterministic assignments.
std::vector<World> mixture_support(const Formula& f, const MixtureParams& m);

struct MixtureBounds {
  std::size_t min_components = 0;  // size of a minimum prime implicant cover
  std::size_t upper = 0;           // |W_phi|
  std::size_t simplex_lower = 0;   // ceil(|W_phi| / (n + 1))
};

MixtureBounds mixture_bounds(const Formula& f, const Limits& limits = {});

// A discretised path of `steps` points from m1 to m2 along which every point
// is a possible distribution. Requires every positive-weight component of
// both endpoints to be possible. With k == 1 the path runs through C_phi and
// exists only when both endpoints lie in the same connected component.
std::vector<MixtureParams> mixture_path(const Formula& f,
                                        const MixtureParams& m1,
                                        const MixtureParams& m2, int steps,
                                        const Limits& limits = {});

}  // namespace losscape
