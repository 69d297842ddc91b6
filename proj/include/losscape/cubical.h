#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "losscape/formula.h"
#include "losscape/implicants.h"

namespace losscape {

// Coordinates closer than this to 0 or 1 count as deterministic.
inline constexpr double kDeterministicEps = 1e-9;

enum class Interval { kZero, kOne, kFull };

// Product of elementary intervals {0}, {1}, [0,1]. Degenerate coordinates are
// stored like a partial assignment: `mask` marks them, `bits` their values.
class ElementaryCube {
 public:
  ElementaryCube() = default;
  ElementaryCube(std::uint64_t bits, std::uint64_t mask, int n);

  int n() const { return n_; }
  int dim() const;
  std::uint64_t bits() const { return bits_; }
  std::uint64_t mask() const { return mask_; }
  Interval interval(int i) const;
  std::vector<Interval> intervals() const;

  bool contains(const ElementaryCube& other) const;
  PartialAssignment assignment() const { return {bits_, mask_}; }

  // Per-variable '0' / '1' / '*'.
  std::string to_string() const;
  static ElementaryCube FromString(std::string_view s);

  friend bool operator==(const ElementaryCube&, const ElementaryCube&) = default;
  // (mask, bits) order.
  friend bool operator<(const ElementaryCube& a, const ElementaryCube& b) {
    return a.mask_ != b.mask_ ? a.mask_ < b.mask_ : a.bits_ < b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
  std::uint64_t mask_ = 0;
  int n_ = 0;
};

ElementaryCube cube_of(const PartialAssignment& pa, int n);

struct CubicalSet {
  std::vector<ElementaryCube> facets;  // prime implicant order
  int n = 0;
};

CubicalSet cubical_set(const Formula& f, const Limits& limits = {});
CubicalSet cubical_set(const PrimeImplicantSet& pis);

// L-infinity distance from mu to the cube.
double linf_distance(const ElementaryCube& cube, std::span<const double> mu);
// Euclidean norm of the per-coordinate clamping residuals.
double l2_distance(const ElementaryCube& cube, std::span<const double> mu);

bool contains(const CubicalSet& cs, std::span<const double> mu,
              double eps = 0.0);
double distance(const CubicalSet& cs, std::span<const double> mu);

struct NearestFacet {
  std::size_t index = 0;  // first facet in order attaining the minimum
  double distance = 0.0;
};
NearestFacet nearest_facet(const CubicalSet& cs, std::span<const double> mu);

// All distinct k-dimensional faces, sorted by (mask, bits).
std::vector<ElementaryCube> faces(const CubicalSet& cs, int k,
                                  const Limits& limits = {});

// The (k-1)-faces of a k-cube: each Full interval pinned to {0} and to {1}.
std::vector<ElementaryCube> boundary_faces(const ElementaryCube& cube);

bool is_convex(const Formula& f, const Limits& limits = {});

struct ConvexityWitness {
  std::vector<double> a, b;     // points of the set
  double lambda = 0.5;
  std::vector<double> mix;      // lambda * a + (1 - lambda) * b, outside
};

// Searches pairs of facet-interior points for a convex combination that
// leaves the set. Empty iff none found, which happens exactly when the set
// has a single facet.
std::optional<ConvexityWitness> find_convexity_witness(const CubicalSet& cs);

}  // namespace losscape
