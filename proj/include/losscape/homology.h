#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "losscape/cubical.h"

namespace losscape {

using BigInt = boost::multiprecision::cpp_int;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix Identity(std::size_t k);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  bool is_zero() const;
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<BigInt> data_;
};

// Exact determinant by fraction-free (Bareiss) elimination.
BigInt determinant(const IntMatrix& m);

struct SparseIntMatrix {
  struct Entry {
    std::size_t row, col;
    int value;
  };
  std::size_t rows = 0, cols = 0;
  std::vector<Entry> entries;

  IntMatrix to_dense() const;
};

struct SmithForm {
  IntMatrix u, d, v;  // u * m * v == d; u, v empty when not tracked
  // Nonzero diagonal entries d_1 | d_2 | ..., all positive.
  std::vector<BigInt> invariant_factors;
};

SmithForm smith_normal_form(const IntMatrix& m, bool track_transforms = true);

// Checks u*m*v == d, |det u| == |det v| == 1, d diagonal and nonnegative with
// the divisibility chain.
bool verify_smith_form(const IntMatrix& m, const SmithForm& snf);

// Invariant factors by unit-pivot sparse elimination, finishing any
// non-unit remainder densely.
std::vector<BigInt> sparse_invariant_factors(const SparseIntMatrix& m);

struct ChainComplex {
  std::vector<std::vector<ElementaryCube>> cubes_by_dim;  // k = 0..n
  // boundary_by_dim[k] is the boundary map from k-cubes to (k-1)-cubes,
  // shaped |C_{k-1}| x |C_k|; index 0 is an empty 0 x |C_0| map.
  std::vector<SparseIntMatrix> boundary_by_dim;
};

ChainComplex chain_complex(const CubicalSet& cs, const Limits& limits = {});

// True if every composite of consecutive boundary maps is zero.
bool boundary_squares_to_zero(const ChainComplex& cc);

struct HomologyOptions {
  // Boundary maps with at most this many entries go through the dense
  // Smith form; larger ones through sparse elimination.
  std::size_t dense_max_entries = 1 << 16;
  bool verify_smith = false;
};

struct HomologyResult {
  std::vector<long long> betti;                  // k = 0..n-1
  std::vector<std::vector<std::string>> torsion; // factors > 1, decimal
  std::vector<long long> ranks;                  // rank of each boundary map
  std::vector<long long> cube_counts;
};

HomologyResult homology(const CubicalSet& cs, const HomologyOptions& opts = {},
                        const Limits& limits = {});
HomologyResult homology(const ChainComplex& cc, const HomologyOptions& opts = {});

}  // namespace losscape
