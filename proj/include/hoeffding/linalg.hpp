#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hoeffding/rational.hpp"

namespace hoeffding {

using Matrix = std::vector<std::vector<Rational>>;

struct Echelon {
  Matrix rows;              // nonzero rows of the reduced row-echelon form
  std::vector<int> pivots;  // pivot column of each row
};

/// Reduced row-echelon form by exact Gauss-Jordan elimination.
inline Echelon rref(Matrix a, std::size_t cols) {
  std::vector<int> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t pick = row;
    while (pick < a.size() && a[pick][col] == 0) ++pick;
    if (pick == a.size()) continue;
    std::swap(a[row], a[pick]);
    const Rational lead = a[row][col];
    for (auto& v : a[row]) v /= lead;
    for (std::size_t other = 0; other < a.size(); ++other) {
      if (other == row || a[other][col] == 0) continue;
      const Rational f = a[other][col];
      for (std::size_t j = col; j < cols; ++j) a[other][j] -= f * a[row][j];
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  a.resize(row);
  return {std::move(a), std::move(pivots)};
}

inline int rank(const Matrix& a, std::size_t cols) { return static_cast<int>(rref(a, cols).pivots.size()); }

/// Basis of {v : a v = 0}, returned in reduced row-echelon form (each leading entry is 1).
inline Matrix nullspace(const Matrix& a, std::size_t cols) {
  Echelon e = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (int p : e.pivots) is_pivot[p] = true;
  Matrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows[i][free];
    basis.push_back(std::move(v));
  }
  if (basis.empty()) return basis;
  return rref(std::move(basis), cols).rows;
}

}  // namespace hoeffding
