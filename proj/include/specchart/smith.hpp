#pragma once

// Normal forms of matrices over k[t]: Smith form with unimodular transforms,
// and the row-style Hermite form used to pick lattice bases.

#include <optional>
#include <vector>

#include "matrix.hpp"
#include "unipoly.hpp"

namespace specchart {

struct SmithForm {
  std::vector<UniPoly> invariants;  // monic, d_1 | d_2 | ...
  Matrix<UniPoly> U;                // m x m, unimodular
  Matrix<UniPoly> V;                // n x n, unimodular
  Matrix<UniPoly> D;                // U * A * V
  Matrix<UniPoly> Vinv;             // inverse of V
};

namespace detail {

inline void row_axpy(Matrix<UniPoly>& m, std::size_t dst, const UniPoly& q, std::size_t src) {
  if (q.is_zero()) return;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!m(src, j).is_zero()) m(dst, j) -= q * m(src, j);
}
inline void col_axpy(Matrix<UniPoly>& m, std::size_t dst, const UniPoly& q, std::size_t src) {
  if (q.is_zero()) return;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (!m(i, src).is_zero()) m(i, dst) -= q * m(i, src);
}

}  // namespace detail

/// Smith normal form over F[t]. U * A * V == D with D diagonal.
inline SmithForm smith_normal_form(const Matrix<UniPoly>& A, const Field& F) {
  const std::size_t m = A.rows(), n = A.cols();
  const UniPoly zero(F), one = UniPoly::constant(F.one());
  SmithForm out{{}, Matrix<UniPoly>::identity(m, zero, one), Matrix<UniPoly>::identity(n, zero, one), A,
                Matrix<UniPoly>::identity(n, zero, one)};
  auto& D = out.D;
  auto& U = out.U;
  auto& V = out.V;
  auto& Vi = out.Vinv;
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    bool exhausted = false;
    for (;;) {
      std::size_t pi = m, pj = n;
      int best = -1;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (!D(i, j).is_zero() && (best < 0 || D(i, j).degree() < best)) {
            best = D(i, j).degree();
            pi = i;
            pj = j;
          }
      if (best < 0) {
        exhausted = true;
        break;
      }
      D.swap_rows(t, pi);
      U.swap_rows(t, pi);
      D.swap_cols(t, pj);
      V.swap_cols(t, pj);
      Vi.swap_rows(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t).is_zero()) continue;
        UniPoly q = D(i, t) / D(t, t);
        detail::row_axpy(D, i, q, t);
        detail::row_axpy(U, i, q, t);
        if (!D(i, t).is_zero()) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D(t, j).is_zero()) continue;
        UniPoly q = D(t, j) / D(t, t);
        detail::col_axpy(D, j, q, t);
        detail::col_axpy(V, j, q, t);
        detail::row_axpy(Vi, t, -q, j);
        if (!D(t, j).is_zero()) clean = false;
      }
      if (!clean) continue;

      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!divides(D(t, t), D(i, j))) {
            detail::row_axpy(D, t, -one, i);
            detail::row_axpy(U, t, -one, i);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (exhausted) break;
    FieldElem c = D(t, t).leading_coeff().inverse();
    for (std::size_t j = 0; j < n; ++j) D(t, j) = c * D(t, j);
    for (std::size_t j = 0; j < m; ++j) U(t, j) = c * U(t, j);
    out.invariants.push_back(D(t, t));
  }
  return out;
}

struct HermiteForm {
  Matrix<UniPoly> H;                 // rank x n, rows form a basis of the row span
  std::vector<std::size_t> pivots;   // pivot column of each row
};

/// Row-style Hermite normal form of the span of the rows of G: echelon,
/// monic pivots, entries above each pivot reduced modulo it.
inline HermiteForm hermite_rows(Matrix<UniPoly> G, const Field& F) {
  const std::size_t N = G.rows(), n = G.cols();
  std::size_t r = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t c = 0; c < n && r < N; ++c) {
    std::size_t p = r;
    while (p < N && G(p, c).is_zero()) ++p;
    if (p == N) continue;
    G.swap_rows(r, p);
    for (std::size_t i = r + 1; i < N; ++i) {
      if (G(i, c).is_zero()) continue;
      if (divides(G(r, c), G(i, c))) {
        detail::row_axpy(G, i, G(i, c) / G(r, c), r);
        continue;
      }
      auto [g, s, u] = xgcd(G(r, c), G(i, c));
      UniPoly a = exact_div(G(r, c), g), b = exact_div(G(i, c), g);
      for (std::size_t j = 0; j < n; ++j) {
        UniPoly x = G(r, j), y = G(i, j);
        G(r, j) = s * x + u * y;
        G(i, j) = b * x - a * y;
      }
    }
    FieldElem inv = G(r, c).leading_coeff().inverse();
    for (std::size_t j = 0; j < n; ++j) G(r, j) = inv * G(r, j);
    for (std::size_t k = 0; k < r; ++k)
      if (!G(k, c).is_zero()) detail::row_axpy(G, k, G(k, c) / G(r, c), r);
    pivots.push_back(c);
    ++r;
  }
  HermiteForm out;
  if (r == 0) {
    out.H = Matrix<UniPoly>(0, n, UniPoly(F));
  } else {
    std::vector<std::size_t> rows(r), cols(n);
    for (std::size_t i = 0; i < r; ++i) rows[i] = i;
    for (std::size_t j = 0; j < n; ++j) cols[j] = j;
    out.H = G.submatrix(rows, cols);
  }
  out.pivots = std::move(pivots);
  return out;
}

}  // namespace specchart
