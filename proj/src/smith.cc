#include <algorithm>
#include <map>
#include <set>

#include "losscape/homology.h"

namespace losscape {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  for (const auto& row : rows) {
    if (row.size() != cols_) throw InvalidArgument("ragged matrix literal");
    for (long long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::Identity(std::size_t k) {
  IntMatrix out(k, k);
  for (std::size_t i = 0; i < k; ++i) out(i, i) = 1;
  return out;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const BigInt& x) { return x.is_zero(); });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matrix shape mismatch");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const BigInt& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        if (!b(k, j).is_zero()) out(i, j) += x * b(k, j);
      }
    }
  }
  return out;
}

BigInt determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      std::size_t p = k + 1;
      while (p < n && a(p, k).is_zero()) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

IntMatrix SparseIntMatrix::to_dense() const {
  IntMatrix out(rows, cols);
  for (const auto& e : entries) out(e.row, e.col) += e.value;
  return out;
}

namespace {

// Elementary-operation engine over a dense matrix with optional tracking of
// the left (row) and right (column) transforms.
class SmithReducer {
 public:
  SmithReducer(const IntMatrix& m, bool track)
      : a_(m), track_(track) {
    if (track_) {
      u_ = IntMatrix::Identity(m.rows());
      v_ = IntMatrix::Identity(m.cols());
    }
  }

  SmithForm Run() {
    const std::size_t m = a_.rows(), n = a_.cols();
    SmithForm out;
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
      if (!BringSmallestToPivot(t)) break;
      while (true) {
        if (ClearColumn(t)) continue;
        if (ClearRow(t)) continue;
        if (FixDivisibility(t)) continue;
        break;
      }
      if (a_(t, t) < 0) NegateRow(t);
      out.invariant_factors.push_back(a_(t, t));
    }
    out.d = std::move(a_);
    if (track_) {
      out.u = std::move(u_);
      out.v = std::move(v_);
    }
    return out;
  }

 private:
  bool BringSmallestToPivot(std::size_t t) {
    std::size_t bi = 0, bj = 0;
    bool found = false;
    BigInt best;
    for (std::size_t i = t; i < a_.rows(); ++i) {
      for (std::size_t j = t; j < a_.cols(); ++j) {
        const BigInt& x = a_(i, j);
        if (x.is_zero()) continue;
        if (!found || abs(x) < best) {
          best = abs(x);
          bi = i;
          bj = j;
          found = true;
          if (best == 1) break;
        }
      }
      if (found && best == 1) break;
    }
    if (!found) return false;
    SwapRows(t, bi);
    SwapCols(t, bj);
    return true;
  }

  // Returns true if a nonzero remainder was left (and a new smaller pivot
  // swapped in), meaning the column must be processed again.
  bool ClearColumn(std::size_t t) {
    bool remainder = false;
    for (std::size_t i = t + 1; i < a_.rows(); ++i) {
      if (a_(i, t).is_zero()) continue;
      const BigInt q = a_(i, t) / a_(t, t);
      if (!q.is_zero()) AddRowMultiple(i, t, -q);
      if (!a_(i, t).is_zero()) remainder = true;
    }
    if (!remainder) return false;
    std::size_t best = t;
    for (std::size_t i = t + 1; i < a_.rows(); ++i) {
      if (!a_(i, t).is_zero() && abs(a_(i, t)) < abs(a_(best, t))) best = i;
    }
    SwapRows(t, best);
    return true;
  }

  bool ClearRow(std::size_t t) {
    bool remainder = false;
    for (std::size_t j = t + 1; j < a_.cols(); ++j) {
      if (a_(t, j).is_zero()) continue;
      const BigInt q = a_(t, j) / a_(t, t);
      if (!q.is_zero()) AddColMultiple(j, t, -q);
      if (!a_(t, j).is_zero()) remainder = true;
    }
    if (!remainder) return false;
    std::size_t best = t;
    for (std::size_t j = t + 1; j < a_.cols(); ++j) {
      if (!a_(t, j).is_zero() && abs(a_(t, j)) < abs(a_(t, best))) best = j;
    }
    SwapCols(t, best);
    return true;
  }

  // With row and column t cleared, the pivot must divide every remaining
  // entry; otherwise fold the offending row into row t and repeat.
  bool FixDivisibility(std::size_t t) {
    const BigInt& p = a_(t, t);
    if (abs(p) == 1) return false;
    for (std::size_t i = t + 1; i < a_.rows(); ++i) {
      for (std::size_t j = t + 1; j < a_.cols(); ++j) {
        if (!a_(i, j).is_zero() && BigInt(a_(i, j) % p) != 0) {
          AddRowMultiple(t, i, BigInt(1));
          return true;
        }
      }
    }
    return false;
  }

  void SwapRows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < a_.cols(); ++j) std::swap(a_(a, j), a_(b, j));
    if (track_) {
      for (std::size_t j = 0; j < u_.cols(); ++j) std::swap(u_(a, j), u_(b, j));
    }
  }

  void SwapCols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < a_.rows(); ++i) std::swap(a_(i, a), a_(i, b));
    if (track_) {
      for (std::size_t i = 0; i < v_.rows(); ++i) std::swap(v_(i, a), v_(i, b));
    }
  }

  // row[dst] += k * row[src]
  void AddRowMultiple(std::size_t dst, std::size_t src, const BigInt& k) {
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      if (!a_(src, j).is_zero()) a_(dst, j) += k * a_(src, j);
    }
    if (track_) {
      for (std::size_t j = 0; j < u_.cols(); ++j) {
        if (!u_(src, j).is_zero()) u_(dst, j) += k * u_(src, j);
      }
    }
  }

  // col[dst] += k * col[src]
  void AddColMultiple(std::size_t dst, std::size_t src, const BigInt& k) {
    for (std::size_t i = 0; i < a_.rows(); ++i) {
      if (!a_(i, src).is_zero()) a_(i, dst) += k * a_(i, src);
    }
    if (track_) {
      for (std::size_t i = 0; i < v_.rows(); ++i) {
        if (!v_(i, src).is_zero()) v_(i, dst) += k * v_(i, src);
      }
    }
  }

  void NegateRow(std::size_t t) {
    for (std::size_t j = 0; j < a_.cols(); ++j) a_(t, j) = -a_(t, j);
    if (track_) {
      for (std::size_t j = 0; j < u_.cols(); ++j) u_(t, j) = -u_(t, j);
    }
  }

  IntMatrix a_, u_, v_;
  bool track_;
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m, bool track_transforms) {
  return SmithReducer(m, track_transforms).Run();
}

bool verify_smith_form(const IntMatrix& m, const SmithForm& snf) {
  const IntMatrix& d = snf.d;
  if (d.rows() != m.rows() || d.cols() != m.cols()) return false;
  if (snf.u.rows() != m.rows() || snf.u.cols() != m.rows()) return false;
  if (snf.v.rows() != m.cols() || snf.v.cols() != m.cols()) return false;
  if (!(snf.u * m * snf.v == d)) return false;
  if (abs(determinant(snf.u)) != 1 || abs(determinant(snf.v)) != 1) return false;
  std::vector<BigInt> diag;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (i != j && !d(i, j).is_zero()) return false;
    }
    if (i < d.cols()) diag.push_back(d(i, i));
  }
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] < 0) return false;
    if (i + 1 < diag.size()) {
      if (diag[i].is_zero()) {
        if (!diag[i + 1].is_zero()) return false;
      } else if (BigInt(diag[i + 1] % diag[i]) != 0) {
        return false;
      }
    }
  }
  std::vector<BigInt> nonzero;
  for (const auto& x : diag) {
    if (!x.is_zero()) nonzero.push_back(x);
  }
  return nonzero == snf.invariant_factors;
}

std::vector<BigInt> sparse_invariant_factors(const SparseIntMatrix& m) {
  std::vector<std::map<std::size_t, BigInt>> rows(m.rows);
  std::vector<std::set<std::size_t>> col_rows(m.cols);
  for (const auto& e : m.entries) {
    BigInt& slot = rows[e.row][e.col];
    slot += e.value;
    if (slot.is_zero()) {
      rows[e.row].erase(e.col);
      col_rows[e.col].erase(e.row);
    } else {
      col_rows[e.col].insert(e.row);
    }
  }

  std::vector<bool> row_alive(m.rows, true), col_alive(m.cols, true);
  std::size_t units = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (!col_alive[c] || col_rows[c].empty()) continue;
      // Unit pivot in this column with the shortest row.
      std::size_t pivot_row = m.rows;
      for (std::size_t r : col_rows[c]) {
        if (abs(rows[r].at(c)) != 1) continue;
        if (pivot_row == m.rows || rows[r].size() < rows[pivot_row].size()) {
          pivot_row = r;
        }
      }
      if (pivot_row == m.rows) continue;
      const BigInt pivot = rows[pivot_row].at(c);
      const auto pivot_entries = rows[pivot_row];
      const std::vector<std::size_t> targets(col_rows[c].begin(),
                                             col_rows[c].end());
      for (std::size_t r : targets) {
        if (r == pivot_row) continue;
        const BigInt factor = rows[r].at(c) * pivot;  // pivot^-1 == pivot
        for (const auto& [col, value] : pivot_entries) {
          BigInt& slot = rows[r][col];
          slot -= factor * value;
          if (slot.is_zero()) {
            rows[r].erase(col);
            col_rows[col].erase(r);
          } else {
            col_rows[col].insert(r);
          }
        }
      }
      for (const auto& [col, value] : pivot_entries) col_rows[col].erase(pivot_row);
      rows[pivot_row].clear();
      row_alive[pivot_row] = false;
      col_alive[c] = false;
      ++units;
      progress = true;
    }
  }

  std::vector<std::size_t> live_rows, live_cols;
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (row_alive[r] && !rows[r].empty()) live_rows.push_back(r);
  }
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (col_alive[c] && !col_rows[c].empty()) live_cols.push_back(c);
  }
  std::vector<BigInt> factors(units, BigInt(1));
  if (!live_rows.empty()) {
    IntMatrix rest(live_rows.size(), live_cols.size());
    for (std::size_t i = 0; i < live_rows.size(); ++i) {
      for (std::size_t j = 0; j < live_cols.size(); ++j) {
        auto it = rows[live_rows[i]].find(live_cols[j]);
        if (it != rows[live_rows[i]].end()) rest(i, j) = it->second;
      }
    }
    for (auto& f : smith_normal_form(rest, false).invariant_factors) {
      factors.push_back(std::move(f));
    }
  }
  return factors;
}

}  // namespace losscape
