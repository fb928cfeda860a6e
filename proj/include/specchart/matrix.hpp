#pragma once

// Dense matrices over commutative rings: determinants, characteristic
// polynomials, and elimination over fields.

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "field.hpp"

namespace specchart {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : r_(rows), c_(cols), d_(rows * cols, fill) {}

  static Matrix identity(std::size_t n, const T& zero, const T& one) {
    Matrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }
  /// Builds from row lists; all rows must have equal length.
  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m;
    m.r_ = rows.size();
    m.c_ = rows[0].size();
    for (const auto& row : rows) {
      if (row.size() != m.c_) throw DimensionError("ragged matrix rows");
      m.d_.insert(m.d_.end(), row.begin(), row.end());
    }
    return m;
  }

  std::size_t rows() const noexcept { return r_; }
  std::size_t cols() const noexcept { return c_; }
  bool is_square() const noexcept { return r_ == c_; }

  T& operator()(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }

  std::vector<T> row(std::size_t i) const { return {d_.begin() + i * c_, d_.begin() + (i + 1) * c_}; }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> v;
    v.reserve(r_);
    for (std::size_t i = 0; i < r_; ++i) v.push_back((*this)(i, j));
    return v;
  }
  void set_col(std::size_t j, const std::vector<T>& v) {
    for (std::size_t i = 0; i < r_; ++i) (*this)(i, j) = v.at(i);
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < r_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  Matrix transpose() const {
    if (d_.empty()) return Matrix(c_, r_, T{});
    Matrix m(c_, r_, d_[0]);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  Matrix submatrix(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    Matrix m;
    m.r_ = rows.size();
    m.c_ = cols.size();
    for (auto i : rows)
      for (auto j : cols) m.d_.push_back((*this)(i, j));
    return m;
  }
  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    std::vector<std::vector<U>> rows(r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) rows[i].push_back(f((*this)(i, j)));
    auto out = Matrix<U>::from_rows(rows);
    return out;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw DimensionError("matrix sum shape mismatch");
    Matrix m = a;
    for (std::size_t k = 0; k < m.d_.size(); ++k) m.d_[k] += b.d_[k];
    return m;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw DimensionError("matrix difference shape mismatch");
    Matrix m = a;
    for (std::size_t k = 0; k < m.d_.size(); ++k) m.d_[k] -= b.d_[k];
    return m;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw DimensionError("matrix product shape mismatch");
    if (a.d_.empty() || b.d_.empty()) throw DimensionError("matrix product of empty matrices");
    T zero = a.d_[0].zero_like();
    Matrix m(a.r_, b.c_, zero);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const T& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.c_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }
  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != c_) throw DimensionError("matrix-vector shape mismatch");
    std::vector<T> out(r_, v.at(0).zero_like());
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  bool is_zero() const {
    for (const auto& x : d_)
      if (!x.is_zero()) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) return false;
    for (std::size_t k = 0; k < a.d_.size(); ++k)
      if (!(a.d_[k] == b.d_[k])) return false;
    return true;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> d_;
};

/// Kronecker product; a's index is the slow one.
template <class T>
Matrix<T> kronecker(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> m(a.rows() * b.rows(), a.cols() * b.cols(), a(0, 0).zero_like());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return m;
}

/// Fraction-free Gaussian elimination. Entries must lie in an integral domain
/// with an `exact_div` overload.
template <class T>
T det_bareiss(Matrix<T> m) {
  if (!m.is_square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) throw DimensionError("determinant of an empty matrix");
  T prev = m(0, 0).one_like();
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k).is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m(p, k).is_zero()) ++p;
      if (p == n) return m(0, 0).zero_like();
      m.swap_rows(k, p);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = exact_div(m(i, j) * m(k, k) - m(i, k) * m(k, j), prev);
      m(i, k) = m(i, k).zero_like();
    }
    prev = m(k, k);
  }
  T d = m(n - 1, n - 1);
  return negate ? -d : d;
}

/// Division-free cofactor expansion over any commutative ring, memoized on
/// column subsets. `reduce` is applied after every product (quotient rings).
template <class T, class Reduce>
T det_cofactor(const Matrix<T>& m, Reduce reduce) {
  if (!m.is_square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) throw DimensionError("determinant of an empty matrix");
  if (n > 20) throw DimensionError("cofactor determinant limited to n <= 20");
  std::unordered_map<std::uint32_t, T> layer{{0u, m(0, 0).one_like()}};
  for (std::size_t k = 0; k < n; ++k) {
    std::unordered_map<std::uint32_t, T> next;
    for (const auto& [mask, val] : layer) {
      if (val.is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        std::uint32_t bit = 1u << j;
        if (mask & bit) continue;
        if (m(k, j).is_zero()) continue;
        int above = std::popcount(mask >> (j + 1));
        T term = reduce(val * m(k, j));
        auto nm = mask | bit;
        auto it = next.find(nm);
        if (it == next.end()) {
          next.emplace(nm, (above & 1) ? -term : term);
        } else if (above & 1) {
          it->second -= term;
        } else {
          it->second += term;
        }
      }
    }
    layer = std::move(next);
  }
  auto it = layer.find((n == 32) ? 0xffffffffu : ((1u << n) - 1));
  return it == layer.end() ? m(0, 0).zero_like() : reduce(it->second);
}

template <class T>
T det_cofactor(const Matrix<T>& m) {
  return det_cofactor(m, [](const T& x) { return x; });
}

/// Characteristic polynomial det(x*I - M) by Berkowitz's division-free
/// algorithm. Returns [1, c_1, ..., c_n] with det(xI - M) = sum c_i x^(n-i).
template <class T>
std::vector<T> charpoly_berkowitz(const Matrix<T>& a) {
  if (!a.is_square()) throw DimensionError("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) throw DimensionError("characteristic polynomial of an empty matrix");
  const T zero = a(0, 0).zero_like(), one = a(0, 0).one_like();
  std::vector<T> p{one, -a(0, 0)};
  for (std::size_t k = 1; k < n; ++k) {
    // leading block A_k (k x k), row R = a(k, 0..k-1), column S = a(0..k-1, k)
    std::vector<T> col(k + 2, zero);
    col[0] = one;
    col[1] = -a(k, k);
    std::vector<T> v(k, zero);  // A_k^i S
    for (std::size_t i = 0; i < k; ++i) v[i] = a(i, k);
    for (std::size_t e = 2; e <= k + 1; ++e) {
      T rs = zero;
      for (std::size_t i = 0; i < k; ++i) rs += a(k, i) * v[i];
      col[e] = -rs;
      if (e == k + 1) break;
      std::vector<T> w(k, zero);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) w[i] += a(i, j) * v[j];
      v = std::move(w);
    }
    // p_new = Toeplitz(col) * p, sizes (k+2) x (k+1)
    std::vector<T> q(k + 2, zero);
    for (std::size_t i = 0; i < k + 2; ++i)
      for (std::size_t j = 0; j <= i && j < k + 1; ++j) q[i] += col[i - j] * p[j];
    p = std::move(q);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Elimination over a field. F needs is_zero(), inverse(), zero_like(), one_like().

/// In-place reduced row echelon form; returns the pivot columns.
template <class F>
std::vector<std::size_t> rref(Matrix<F>& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    F inv = m(r, c).inverse();
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      F f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class F>
std::size_t rank(Matrix<F> m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return rref(m).size();
}

/// Basis of the right kernel {v : m v = 0}.
template <class F>
std::vector<std::vector<F>> kernel(Matrix<F> m) {
  if (m.rows() == 0) throw DimensionError("kernel of a matrix with no rows");
  const F zero = m(0, 0).zero_like(), one = m(0, 0).one_like();
  auto piv = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<std::vector<F>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<F> v(m.cols(), zero);
    v[free] = one;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves m x = b when solvable.
template <class F>
std::optional<std::vector<F>> solve(const Matrix<F>& m, const std::vector<F>& b) {
  Matrix<F> aug(m.rows(), m.cols() + 1, b.at(0).zero_like());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
  std::vector<F> x(m.cols(), b[0].zero_like());
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, m.cols());
  return x;
}

/// Right kernel over F_p on raw residues; used for large structured systems.
inline std::vector<std::vector<std::uint32_t>> kernel_mod_p(std::vector<std::vector<std::uint32_t>> rows, std::size_t ncols,
                                                            std::uint64_t p) {
  auto inv = [p](std::uint64_t a) {
    std::uint64_t r = 1, e = p - 2;
    a %= p;
    while (e) {
      if (e & 1) r = r * a % p;
      a = a * a % p;
      e >>= 1;
    }
    return r;
  };
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t s = r;
    while (s < rows.size() && rows[s][c] == 0) ++s;
    if (s == rows.size()) continue;
    std::swap(rows[r], rows[s]);
    std::uint64_t iv = inv(rows[r][c]);
    for (std::size_t j = c; j < ncols; ++j) rows[r][j] = static_cast<std::uint32_t>(rows[r][j] * iv % p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      std::uint64_t f = rows[i][c];
      auto& ri = rows[i];
      const auto& rr = rows[r];
      for (std::size_t j = c; j < ncols; ++j) {
        if (rr[j] == 0) continue;
        ri[j] = static_cast<std::uint32_t>((ri[j] + (p - f) * rr[j]) % p);
      }
    }
    piv.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<std::vector<std::uint32_t>> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::uint32_t> v(ncols, 0);
    v[free] = 1;
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = static_cast<std::uint32_t>((p - rows[k][free]) % p);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace specchart
