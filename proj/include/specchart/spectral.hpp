#pragma once

// Higgs matrices over a base chart and rank-1 modules over a monic cover:
// the correspondence in both directions, the exact sequence
// 0 -> M -Q-> S (x) M -Psi-> S (x) M -ev-> M -> 0, and checkers for
// SL / Sp / GSp spectral data. Closed-form degree and Euler formulas.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cover.hpp"
#include "matrix.hpp"
#include "smith.hpp"
#include "unipoly.hpp"

namespace specchart {

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvolutionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Matrix<UniPoly> to_uni_matrix(const Matrix<MultiPoly>& m) {
  return m.map([](const MultiPoly& e) { return e.to_uni(0); });
}
inline Matrix<MultiPoly> from_uni_matrix(const QuotientRing& R, const Matrix<UniPoly>& m) {
  return m.map([&](const UniPoly& e) { return R.from_uni(e, 0); });
}
inline Matrix<UniPoly> uni_identity(const Field& F, std::size_t n) {
  return Matrix<UniPoly>::identity(n, UniPoly(F), UniPoly::constant(F.one()));
}

/// Solves L y = b with L lower triangular, entries exact in k[t].
inline std::vector<UniPoly> lower_solve(const Matrix<UniPoly>& L, const std::vector<UniPoly>& b) {
  const std::size_t n = L.rows();
  std::vector<UniPoly> y(n, UniPoly(L(0, 0).field()));
  for (std::size_t i = 0; i < n; ++i) {
    UniPoly acc = b[i];
    for (std::size_t j = 0; j < i; ++j) acc -= L(i, j) * y[j];
    if (L(i, i).is_zero()) throw DegenerateError("singular lattice basis");
    auto [q, rem] = acc.divrem(L(i, i));
    if (!rem.is_zero()) throw std::logic_error("element does not lie in the lattice");
    y[i] = q;
  }
  return y;
}

inline Matrix<UniPoly> adjugate_matrix(const Matrix<UniPoly>& K) {
  const std::size_t n = K.rows();
  const Field& F = K(0, 0).field();
  Matrix<UniPoly> adj(n, n, UniPoly(F));
  if (n == 1) {
    adj(0, 0) = UniPoly::constant(F.one());
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> rs, cs;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) rs.push_back(k);
        if (k != i) cs.push_back(k);
      }
      UniPoly m = det_bareiss(K.submatrix(rs, cs));
      adj(i, j) = ((i + j) % 2 == 0) ? m : -m;
    }
  return adj;
}

inline std::uint32_t max_entry_degree(const Matrix<UniPoly>& m) {
  int d = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d = std::max(d, m(i, j).degree());
  return static_cast<std::uint32_t>(d);
}

}  // namespace detail

/// An n x n matrix over the base chart ring. The twist L is trivialized on
/// the chart; `twist` records the power of L the matrix is valued in.
class HiggsChart {
 public:
  HiggsChart(RingPtr base, Matrix<MultiPoly> phi, int twist = 1, std::vector<std::string> labels = {})
      : base_(std::move(base)), phi_(std::move(phi)), twist_(twist), labels_(std::move(labels)) {
    if (!phi_.is_square() || phi_.rows() == 0) throw ShapeError("Higgs matrix must be square and nonempty");
    for (std::size_t i = 0; i < phi_.rows(); ++i)
      for (std::size_t j = 0; j < phi_.cols(); ++j) {
        if (phi_(i, j).nvars() != base_->nvars()) throw DimensionError("Higgs entry arity does not match the base");
        phi_(i, j) = base_->reduce(phi_(i, j));
      }
    if (labels_.empty())
      for (std::size_t i = 0; i < rank(); ++i) labels_.push_back("e" + std::to_string(i + 1));
  }

  const RingPtr& base() const noexcept { return base_; }
  const Matrix<MultiPoly>& phi() const noexcept { return phi_; }
  std::size_t rank() const noexcept { return phi_.rows(); }
  int twist() const noexcept { return twist_; }
  /// Names of the basis vectors the matrix is written in.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Matrix<UniPoly> uni() const {
    if (!base_->is_univariate_polynomial_ring()) throw UnsupportedError("operation needs the base chart k[t]");
    return detail::to_uni_matrix(phi_);
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rank(); ++i) {
      s += i ? ", [" : "[";
      for (std::size_t j = 0; j < rank(); ++j) s += (j ? ", " : "") + base_->format(phi_(i, j));
      s += "]";
    }
    return s + "]";
  }

 private:
  RingPtr base_;
  Matrix<MultiPoly> phi_;
  int twist_;
  std::vector<std::string> labels_;
};

/// (a_1, ..., a_n) with det(x - Phi) = x^n + a_1 x^(n-1) + ... + a_n.
inline std::vector<MultiPoly> char_coeffs(const HiggsChart& h) {
  auto c = charpoly_berkowitz(h.phi());
  std::vector<MultiPoly> a;
  for (std::size_t i = 1; i < c.size(); ++i) a.push_back(h.base()->reduce(c[i]));
  return a;
}

inline std::vector<MultiPoly> char_coeffs(const RingPtr& base, const Matrix<MultiPoly>& phi) { return char_coeffs(HiggsChart(base, phi)); }

/// A rank-1 module over a monic cover: a fractional ideal, or the cokernel of
/// a matrix over S (S^k modulo the column span).
class SpectralModule {
 public:
  enum class Form { Fractional, Presentation };

  static SpectralModule fractional(FractionalIdeal J, int twist = 0) {
    SpectralModule m(J.cover(), Form::Fractional, twist);
    m.ideal_.emplace(std::move(J));
    return m;
  }
  static SpectralModule presentation(CoverPtr S, Matrix<MultiPoly> relations, int twist = 0) {
    if (relations.rows() == 0) throw ShapeError("presentation needs at least one generator");
    for (std::size_t i = 0; i < relations.rows(); ++i)
      for (std::size_t j = 0; j < relations.cols(); ++j) relations(i, j) = S->reduce(relations(i, j));
    SpectralModule m(std::move(S), Form::Presentation, twist);
    m.rel_ = std::move(relations);
    return m;
  }

  Form form() const noexcept { return form_; }
  const CoverPtr& cover() const noexcept { return S_; }
  int twist() const noexcept { return twist_; }
  const FractionalIdeal& ideal() const {
    if (!ideal_) throw UnsupportedError("module is not in fractional form");
    return *ideal_;
  }
  const Matrix<MultiPoly>& relations() const {
    if (form_ != Form::Presentation) throw UnsupportedError("module is not in presentation form");
    return rel_;
  }

  std::string to_string() const {
    if (ideal_) return ideal_->to_string();
    std::string s = "coker[";
    for (std::size_t i = 0; i < rel_.rows(); ++i) {
      s += i ? ", [" : "[";
      for (std::size_t j = 0; j < rel_.cols(); ++j) s += (j ? ", " : "") + S_->format(rel_(i, j));
      s += "]";
    }
    return s + "]";
  }

 private:
  SpectralModule(CoverPtr S, Form f, int twist) : S_(std::move(S)), form_(f), twist_(twist) {}
  CoverPtr S_;
  Form form_;
  int twist_;
  std::optional<FractionalIdeal> ideal_;
  Matrix<MultiPoly> rel_;
};

namespace detail {

inline void require_spectral_cover(const CoverChart& S) {
  if (S.form() != CoverForm::Monic) throw UnsupportedError("spectral operations need a MONIC cover");
  if (!S.base_is_k_t()) throw UnsupportedError("spectral operations need the base chart k[t]");
}

inline std::vector<UniPoly> cover_coeffs_uni(const CoverChart& S) {
  std::vector<UniPoly> a;
  for (const auto& c : S.coefficients()) a.push_back(c.to_uni(0));
  return a;
}

inline void check_hitchin_image(const CoverChart& S, const Matrix<UniPoly>& phi) {
  auto c = charpoly_berkowitz(phi);
  auto a = cover_coeffs_uni(S);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(c[i + 1] == a[i])) throw std::logic_error("characteristic polynomial of the computed matrix differs from the cover");
}

/// Lattice basis of a fractional ideal and the lower-triangular coordinate
/// matrix whose columns are the coordinates of the basis elements.
struct LatticeData {
  std::vector<MultiPoly> basis;
  Matrix<UniPoly> B;
};

inline LatticeData fractional_lattice(const CoverChart& S, const FractionalIdeal& J) {
  LatticeData L;
  L.basis = lattice_basis(S, J.numerator());
  const std::size_t n = S.degree();
  if (L.basis.size() != n) throw DegenerateError("module is not free of rank " + std::to_string(n) + " over the base");
  L.B = Matrix<UniPoly>(n, n, UniPoly(S.field()));
  for (std::size_t j = 0; j < n; ++j) {
    auto c = S.coords(L.basis[j]);
    for (std::size_t i = 0; i < n; ++i) L.B(i, j) = c[i].to_uni(0);
  }
  return L;
}

inline std::string element_label(const CoverChart& S, const MultiPoly& b, const MultiPoly& den) {
  std::string s = S.format(b);
  if (!den.is_one()) s = "(" + s + ")/(" + S.format(den) + ")";
  return s;
}

}  // namespace detail

/// Matrix of multiplication by x in an R-basis of M. For presentations the
/// basis comes from the Smith form of the relation lattice, or, with
/// `generator_basis`, from the images of the generators when those are a basis.
inline HiggsChart module_to_higgs(const SpectralModule& M, bool generator_basis = false) {
  const CoverChart& S = *M.cover();
  detail::require_spectral_cover(S);
  const std::size_t n = S.degree();
  const Field& F = S.field();
  const QuotientRing& R = *S.base();

  if (M.form() == SpectralModule::Form::Fractional) {
    const auto& J = M.ideal();
    auto L = detail::fractional_lattice(S, J);
    Matrix<UniPoly> phi(n, n, UniPoly(F));
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<UniPoly> rhs;
      for (const auto& c : S.coords(S.x() * L.basis[j])) rhs.push_back(c.to_uni(0));
      phi.set_col(j, detail::lower_solve(L.B, rhs));
    }
    detail::check_hitchin_image(S, phi);
    std::vector<std::string> labels;
    for (const auto& b : L.basis) labels.push_back(detail::element_label(S, b, J.denominator()));
    return HiggsChart(S.base(), detail::from_uni_matrix(R, phi), 1, labels);
  }

  // Presentation: S^k / A S^m as an R-module is R^(kn) modulo the lattice
  // spanned by coords(A_c * b_l). Split off the relation lattice with Smith.
  const auto& A = M.relations();
  const std::size_t k = A.rows(), N = k * n;
  std::vector<std::vector<UniPoly>> rows;
  for (std::size_t c = 0; c < A.cols(); ++c)
    for (std::size_t l = 0; l < n; ++l) {
      std::vector<UniPoly> v;
      v.reserve(N);
      for (std::size_t i = 0; i < k; ++i)
        for (const auto& e : S.coords(A(i, c) * S.basis_element(l))) v.push_back(e.to_uni(0));
      rows.push_back(std::move(v));
    }
  std::size_t s = 0;
  Matrix<UniPoly> V = detail::uni_identity(F, N), Vinv = V;
  if (!rows.empty()) {
    auto sm = smith_normal_form(Matrix<UniPoly>::from_rows(rows), F);
    for (const auto& d : sm.invariants) {
      if (d.is_zero()) continue;
      if (!d.is_unit()) throw DegenerateError("module has torsion over the base (invariant factor " + d.to_string() + ")");
      ++s;
    }
    V = sm.V;
    Vinv = sm.Vinv;
  }
  if (N - s != n) throw DegenerateError("module is free of rank " + std::to_string(N - s) + " over the base, expected " + std::to_string(n));
  // x acting on row vectors of R^(kn)
  Matrix<UniPoly> X(N, N, UniPoly(F));
  for (std::size_t l = 0; l < n; ++l) {
    auto c = S.coords(S.x() * S.basis_element(l));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l2 = 0; l2 < n; ++l2) X(i * n + l, i * n + l2) = c[l2].to_uni(0);
  }
  Matrix<UniPoly> Y = Vinv * X * V;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = s; j < N; ++j)
      if (!Y(i, j).is_zero()) throw std::logic_error("relation lattice is not stable under x");
  Matrix<UniPoly> phi(n, n, UniPoly(F));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) phi(i, j) = Y(s + j, s + i);
  if (generator_basis && k == n) {
    // column i: free coordinates of the i-th generator
    Matrix<UniPoly> G(n, n, UniPoly(F));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) G(j, i) = V(i * n, s + j);
    UniPoly d = det_bareiss(G);
    if (d.is_unit()) {
      FieldElem inv = d.leading_coeff().inverse();
      Matrix<UniPoly> Gi = detail::adjugate_matrix(G).map([&](const UniPoly& e) { return inv * e; });
      phi = Gi * phi * G;
    }
  }
  detail::check_hitchin_image(S, phi);
  return HiggsChart(S.base(), detail::from_uni_matrix(R, phi), 1);
}

/// Cokernel of (Phi - x) over S; represents M (x) pi^*L on the chart.
inline SpectralModule higgs_to_module(const CoverPtr& S, const HiggsChart& h) {
  if (S->form() != CoverForm::Monic) throw UnsupportedError("spectral operations need a MONIC cover");
  const auto& a = S->coefficients();
  if (h.rank() != a.size()) throw IncompatibleError("Higgs rank differs from the cover degree");
  if (!h.base()->same_as(*S->base())) throw RingMismatch("Higgs matrix and cover live over different bases");
  auto c = char_coeffs(h);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!h.base()->equal(c[i], a[i])) throw IncompatibleError("characteristic polynomial of the Higgs matrix differs from the cover polynomial");
  const std::size_t n = h.rank();
  Matrix<MultiPoly> A(n, n, S->zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = S->embed(h.phi()(i, j)) - (i == j ? S->x() : S->zero());
  return SpectralModule::presentation(S, A, h.twist());
}

/// Fractional form via a cyclic vector v of Phi: e_i = sum_j (K^-1)_{ji} x^j v
/// with K the Krylov matrix [v, Phi v, ...].
inline FractionalIdeal to_fractional(const SpectralModule& M, std::uint64_t seed = 0x5eed) {
  if (M.form() == SpectralModule::Form::Fractional) return M.ideal();
  const CoverChart& S = *M.cover();
  auto phi = module_to_higgs(M, true).uni();
  const std::size_t n = phi.rows();
  const Field& F = S.field();
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<UniPoly> v(n, UniPoly(F));
    if (attempt < static_cast<int>(n)) {
      v[static_cast<std::size_t>(attempt)] = UniPoly::constant(F.one());
    } else {
      for (auto& e : v) e = UniPoly::constant(random_scalar(F, rng));
    }
    Matrix<UniPoly> K(n, n, UniPoly(F));
    for (std::size_t j = 0; j < n; ++j) {
      K.set_col(j, v);
      v = phi.apply(v);
    }
    UniPoly d = det_bareiss(K);
    if (d.is_zero()) continue;
    auto adj = detail::adjugate_matrix(K);
    std::vector<MultiPoly> gens;
    for (std::size_t i = 0; i < n; ++i) {
      MultiPoly g = S.zero();
      for (std::size_t j = 0; j < n; ++j) g += S.embed(S.base()->from_uni(adj(j, i), 0)) * S.x().pow(static_cast<std::uint32_t>(j));
      gens.push_back(S.reduce(g));
    }
    return FractionalIdeal(M.cover(), Ideal(S.ring(), gens), S.embed(S.base()->from_uni(d, 0)));
  }
  throw DegenerateError("no cyclic vector found; module is not of rank 1");
}

// ---------------------------------------------------------------------------
// The exact sequence 0 -> M -Q-> S (x) M -Psi-> S (x) M -ev-> M -> 0.
// Tensor basis x^i (x) e_j, index i*r + j.

struct BnrMatrices {
  Matrix<UniPoly> Q;    // r^2 x r
  Matrix<UniPoly> Psi;  // r^2 x r^2
  Matrix<UniPoly> ev;   // r x r^2
};

inline BnrMatrices bnr_matrices(const Matrix<UniPoly>& phi, const std::vector<UniPoly>& a) {
  const std::size_t r = phi.rows();
  const Field& F = phi(0, 0).field();
  const UniPoly zero(F), one = UniPoly::constant(F.one());
  std::vector<Matrix<UniPoly>> pw{detail::uni_identity(F, r)};
  for (std::size_t i = 1; i < r; ++i) pw.push_back(pw.back() * phi);
  auto coef = [&](std::size_t j) { return j == 0 ? one : a[j - 1]; };

  BnrMatrices out{Matrix<UniPoly>(r * r, r, zero), Matrix<UniPoly>(), Matrix<UniPoly>(r, r * r, zero)};
  for (std::size_t i = 0; i < r; ++i) {
    Matrix<UniPoly> blk(r, r, zero);
    for (std::size_t j = 0; j + i < r; ++j) {
      const auto& P = pw[r - 1 - i - j];
      for (std::size_t u = 0; u < r; ++u)
        for (std::size_t w = 0; w < r; ++w) blk(u, w) += coef(j) * P(u, w);
    }
    for (std::size_t u = 0; u < r; ++u)
      for (std::size_t w = 0; w < r; ++w) out.Q(i * r + u, w) = blk(u, w);
    for (std::size_t u = 0; u < r; ++u)
      for (std::size_t w = 0; w < r; ++w) out.ev(u, i * r + w) = pw[i](u, w);
  }
  Matrix<UniPoly> C(r, r, zero);  // x on S in the basis x^i
  for (std::size_t i = 0; i + 1 < r; ++i) C(i + 1, i) = one;
  for (std::size_t j = 1; j <= r; ++j) C(r - j, r - 1) = -a[j - 1];
  out.Psi = kronecker(detail::uni_identity(F, r), phi) - kronecker(C, detail::uni_identity(F, r));
  return out;
}

/// Q(m) for m given by coordinates in the R-basis of M; r^2 coordinates in
/// the tensor basis.
inline std::vector<MultiPoly> bnr_q_map(const HiggsChart& h, const std::vector<MultiPoly>& m) {
  if (m.size() != h.rank()) throw DimensionError("element length differs from the rank");
  auto phi = h.uni();
  auto a = char_coeffs(h);
  std::vector<UniPoly> au, mu;
  for (const auto& e : a) au.push_back(e.to_uni(0));
  for (const auto& e : m) mu.push_back(e.to_uni(0));
  auto Qm = bnr_matrices(phi, au).Q.apply(mu);
  std::vector<MultiPoly> out;
  for (const auto& e : Qm) out.push_back(h.base()->from_uni(e, 0));
  return out;
}

/// Coordinates of m in the lattice basis used by module_to_higgs.
inline std::vector<MultiPoly> module_coordinates(const FractionalIdeal& J, const MultiPoly& m) {
  const CoverChart& S = *J.cover();
  auto L = detail::fractional_lattice(S, J);
  std::vector<UniPoly> rhs;
  for (const auto& c : S.coords(m * J.denominator())) rhs.push_back(c.to_uni(0));
  std::vector<MultiPoly> out;
  for (const auto& y : detail::lower_solve(L.B, rhs)) out.push_back(S.base()->from_uni(y, 0));
  return out;
}

/// "1⊗x + x⊗1" style rendering of a tensor-basis vector.
inline std::string format_tensor(const CoverChart& S, const HiggsChart& h, const std::vector<MultiPoly>& v) {
  const std::size_t r = h.rank();
  const QuotientRing& R = *h.base();
  std::string out;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<std::string> parts;
    for (std::size_t j = 0; j < r; ++j) {
      const MultiPoly& c = v[i * r + j];
      if (c.is_zero()) continue;
      std::string lab = h.labels()[j];
      if (c.is_one()) {
        parts.push_back(lab);
      } else {
        std::string cs = R.format(c);
        if (c.terms().size() > 1) cs = "(" + cs + ")";
        parts.push_back(lab == "1" ? cs : cs + "*" + lab);
      }
    }
    if (parts.empty()) continue;
    std::string right = parts[0];
    for (std::size_t k = 1; k < parts.size(); ++k) right += " + " + parts[k];
    if (parts.size() > 1 || right.find_first_of("+-") != std::string::npos) right = "(" + right + ")";
    std::string left = i == 0 ? "1" : S.format(S.x().pow(static_cast<std::uint32_t>(i)));
    out += (out.empty() ? "" : " + ") + left + "⊗" + right;
  }
  return out.empty() ? "0" : out;
}

struct SpecializationCheck {
  std::string point;  // the irreducible q with t -> root of q
  int degree = 1;
  std::size_t rank_q = 0, rank_psi = 0, rank_ev = 0;
  bool ok = false;
};

enum class BnrStatus { Pass, Fail, Inconclusive };
inline std::string to_string(BnrStatus s) {
  switch (s) {
    case BnrStatus::Pass: return "PASS";
    case BnrStatus::Fail: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

struct BnrReport {
  BnrStatus status = BnrStatus::Inconclusive;
  std::size_t r = 0;
  bool psi_q_zero = false, ev_psi_zero = false;
  std::string discriminant;
  std::vector<SpecializationCheck> points;  // sorted by (degree, point)
  std::vector<std::string> failures;
  std::vector<std::string> transcript;
};

namespace detail {

/// Discriminant of P = x^r + a_1 x^(r-1) + ... as the resultant Res(P, P').
inline UniPoly discriminant(const std::vector<UniPoly>& a, const Field& F) {
  const std::size_t r = a.size();
  if (r == 1) return UniPoly::constant(F.one());
  const UniPoly zero(F);
  std::vector<UniPoly> p{UniPoly::constant(F.one())}, dp;
  for (const auto& c : a) p.push_back(c);
  for (std::size_t i = 0; i < r; ++i) dp.push_back(F.from_int(static_cast<std::int64_t>(r - i)) * p[i]);
  const std::size_t N = 2 * r - 1;
  Matrix<UniPoly> syl(N, N, zero);
  for (std::size_t i = 0; i + 1 < r; ++i)
    for (std::size_t j = 0; j <= r; ++j) syl(i, i + j) = p[j];
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) syl(r - 1 + i, i + j) = dp[j];
  return det_bareiss(syl);
}

inline Matrix<ResidueElem> specialize(const Matrix<UniPoly>& m, const std::shared_ptr<const UniPoly>& q) {
  return m.map([&](const UniPoly& e) { return ResidueElem(q, e); });
}

/// Closed points q (monic irreducible) with disc mod q != 0; all points of
/// low degree, then a seeded sample of the last degree needed.
inline std::vector<UniPoly> smooth_points(const UniPoly& disc, const Field& F, std::size_t want, std::uint64_t seed) {
  std::vector<UniPoly> out;
  if (F.is_rational()) {
    for (std::int64_t c = 0; out.size() < want && c < 4 * static_cast<std::int64_t>(want) + 64; ++c)
      for (std::int64_t sgn : {1, -1}) {
        if (c == 0 && sgn == -1) continue;
        UniPoly q = UniPoly::from_ints(F, {-sgn * c, 1});
        if (out.size() < want && !(disc % q).is_zero()) out.push_back(q);
      }
    return out;
  }
  std::mt19937_64 rng(seed);
  for (int d = 1; d <= 8 && out.size() < want; ++d) {
    std::vector<UniPoly> cand;
    for (auto& q : monic_irreducibles(F, d))
      if (!(disc % q).is_zero()) cand.push_back(q);
    if (out.size() + cand.size() > want) {
      std::shuffle(cand.begin(), cand.end(), rng);
      cand.resize(want - out.size());
      std::sort(cand.begin(), cand.end(), [](const UniPoly& x, const UniPoly& y) { return x.to_string() < y.to_string(); });
    }
    out.insert(out.end(), cand.begin(), cand.end());
  }
  return out;
}

}  // namespace detail

inline BnrReport verify_bnr_sequence(const HiggsChart& h, std::uint64_t seed = 1, std::size_t want_points = 20) {
  BnrReport rep;
  auto phi = h.uni();
  const Field& F = phi(0, 0).field();
  const std::size_t r = phi.rows();
  rep.r = r;
  std::vector<UniPoly> a;
  for (const auto& c : char_coeffs(h)) a.push_back(c.to_uni(0));
  auto mats = bnr_matrices(phi, a);
  rep.psi_q_zero = (mats.Psi * mats.Q).is_zero();
  rep.ev_psi_zero = (mats.ev * mats.Psi).is_zero();
  if (!rep.psi_q_zero) rep.failures.push_back("Psi*Q is not zero");
  if (!rep.ev_psi_zero) rep.failures.push_back("ev*Psi is not zero");
  UniPoly disc = detail::discriminant(a, F);
  rep.discriminant = disc.to_string(h.base()->var_names()[0]);
  rep.transcript.push_back("discriminant of P: " + rep.discriminant);
  if (disc.is_zero()) {
    rep.transcript.push_back("P is not squarefree; every fiber is non-reduced");
    rep.status = rep.failures.empty() ? BnrStatus::Inconclusive : BnrStatus::Fail;
    return rep;
  }
  auto pts = detail::smooth_points(disc, F, want_points, seed);
  for (const auto& q : pts) {
    auto qp = std::make_shared<const UniPoly>(q);
    SpecializationCheck c;
    c.point = q.to_string(h.base()->var_names()[0]);
    c.degree = q.degree();
    c.rank_q = rank(detail::specialize(mats.Q, qp));
    c.rank_psi = rank(detail::specialize(mats.Psi, qp));
    c.rank_ev = rank(detail::specialize(mats.ev, qp));
    c.ok = c.rank_q == r && c.rank_psi == r * r - r && c.rank_ev == r;
    if (!c.ok)
      rep.failures.push_back("homology at " + c.point + ": rank Q = " + std::to_string(c.rank_q) + ", rank Psi = " + std::to_string(c.rank_psi) +
                             ", rank ev = " + std::to_string(c.rank_ev));
    rep.points.push_back(std::move(c));
  }
  rep.transcript.push_back("checked " + std::to_string(rep.points.size()) + " smooth specializations");
  if (!rep.failures.empty()) {
    rep.status = BnrStatus::Fail;
  } else if (rep.points.size() < want_points) {
    rep.transcript.push_back("fewer smooth specializations than requested");
    rep.status = BnrStatus::Inconclusive;
  } else {
    rep.status = BnrStatus::Pass;
  }
  return rep;
}

inline BnrReport verify_bnr_sequence(const SpectralModule& M, std::uint64_t seed = 1, std::size_t want_points = 20) {
  return verify_bnr_sequence(module_to_higgs(M), seed, want_points);
}

// ---------------------------------------------------------------------------
// SL: norm fiber. Sp: involution and duality. GSp: trace translation.

enum class FiberVerdict { InFiber, NotInFiber, Undecided };
inline std::string to_string(FiberVerdict v) {
  switch (v) {
    case FiberVerdict::InFiber: return "IN_FIBER";
    case FiberVerdict::NotInFiber: return "NOT_IN_FIBER";
    default: return "UNDECIDED";
  }
}

struct FiberResult {
  FiberVerdict verdict;
  std::string norm;     // e.g. "(t)" or "(t - 1)/(t + 1)"
  std::string witness;  // generator trivializing the norm, when in the fiber
};

inline FiberResult norm_fiber_check(const SpectralModule& M) {
  const CoverChart& S = *M.cover();
  if (!S.base_is_k_t()) throw UnsupportedError("norm fiber check needs the base chart k[t]");
  BaseFraction n = ideal_norm(to_fractional(M));
  std::string v = S.base()->var_names()[0];
  if (n.is_unit()) return {FiberVerdict::InFiber, n.to_string(v), "1"};
  return {FiberVerdict::NotInFiber, n.to_string(v), ""};
}

/// True iff every odd-index coefficient vanishes, i.e. P(-x) = P(x) up to sign.
inline bool sp_parity_check(const std::vector<MultiPoly>& a) {
  for (std::size_t i = 0; i < a.size(); i += 2)
    if (!a[i].is_zero()) return false;
  return true;
}

namespace detail {
inline MultiPoly apply_sigma(const CoverChart& S, const MultiPoly& f) {
  std::vector<MultiPoly> img;
  const std::size_t nv = S.ring()->nvars();
  for (std::size_t i = 0; i < nv; ++i) img.push_back(i == 0 ? -S.x() : S.var(i));
  return S.reduce(f.substitute(img));
}
inline void require_sigma(const CoverChart& S) {
  if (S.form() != CoverForm::Monic) throw InvolutionError("the involution needs a MONIC cover");
  if (S.degree() % 2 != 0 || !sp_parity_check(S.coefficients())) throw InvolutionError("cover is not invariant under x -> -x");
}
}  // namespace detail

inline SpectralModule sigma_pullback(const SpectralModule& M) {
  const CoverChart& S = *M.cover();
  detail::require_sigma(S);
  if (M.form() == SpectralModule::Form::Presentation) {
    auto A = M.relations().map([&](const MultiPoly& e) { return detail::apply_sigma(S, e); });
    return SpectralModule::presentation(M.cover(), A, M.twist());
  }
  const auto& J = M.ideal();
  std::vector<MultiPoly> g;
  for (const auto& f : J.numerator().gens()) g.push_back(detail::apply_sigma(S, f));
  return SpectralModule::fractional(FractionalIdeal(M.cover(), Ideal(S.ring(), g), detail::apply_sigma(S, J.denominator())), M.twist());
}

enum class DualityVerdict { Holds, Fails, Undecided };
inline std::string to_string(DualityVerdict v) {
  switch (v) {
    case DualityVerdict::Holds: return "HOLDS";
    case DualityVerdict::Fails: return "FAILS";
    default: return "UNDECIDED";
  }
}

struct DualityResult {
  DualityVerdict verdict;
  std::string witness;  // h with h * M^dual = sigma^* M
  bool witness_verified = false;
  std::string reason;
  int twist_exponent = 0;  // 1 - 2r; trivial on the chart
  std::string dual, pullback;
};

inline DualityResult sp_duality_check(const SpectralModule& M, std::uint64_t seed = 1, int trials = 24) {
  const CoverChart& S = *M.cover();
  detail::require_sigma(S);
  if (!S.base_is_k_t()) throw UnsupportedError("duality check needs the base chart k[t]");
  FractionalIdeal J = to_fractional(M);
  FractionalIdeal dual = frac_dual(J);
  FractionalIdeal pull = sigma_pullback(SpectralModule::fractional(J)).ideal();
  DualityResult out;
  out.twist_exponent = 1 - static_cast<int>(S.degree());
  out.dual = dual.to_string();
  out.pullback = pull.to_string();
  IsoResult iso = ideal_iso_test(pull, dual, seed, trials);
  out.reason = iso.reason;
  if (iso.verdict == IsoVerdict::Isomorphic) {
    out.verdict = DualityVerdict::Holds;
    out.witness = format_fraction(S, *iso.witness);
    out.witness_verified = verify_witness(pull, dual, *iso.witness);
  } else if (iso.verdict == IsoVerdict::NotIsomorphic) {
    out.verdict = DualityVerdict::Fails;
  } else {
    out.verdict = DualityVerdict::Undecided;
  }
  return out;
}

struct GspResult {
  HiggsChart phi_prime;
  MultiPoly mu;
  bool trace_zero = false;
  bool shift_identity = false;  // char_Phi(x + mu) == char_Phi'(x)
};

inline GspResult gsp_translate(const HiggsChart& h) {
  const std::size_t n = h.rank();
  if (n % 2 != 0) throw ShapeError("trace translation needs even rank");
  const QuotientRing& R = *h.base();
  const Field& F = R.field();
  if (F.is_prime() && n % F.characteristic() == 0) throw std::domain_error("characteristic divides the rank");
  MultiPoly tr = R.zero();
  for (std::size_t i = 0; i < n; ++i) tr += h.phi()(i, i);
  MultiPoly mu = R.reduce(F.from_int(static_cast<std::int64_t>(n)).inverse() * tr);
  Matrix<MultiPoly> P = h.phi();
  for (std::size_t i = 0; i < n; ++i) P(i, i) = R.reduce(P(i, i) - mu);
  HiggsChart hp(h.base(), P, h.twist(), h.labels());

  MultiPoly tr2 = R.zero();
  for (std::size_t i = 0; i < n; ++i) tr2 += P(i, i);
  // coefficients of char_Phi(x + mu), lowest power of x first
  auto c = charpoly_berkowitz(h.phi());  // c[i] multiplies x^(n-i)
  std::vector<MultiPoly> shifted(n + 1, R.zero());
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t d = n - i;
    mpz_class binom = 1;
    for (std::size_t k = 0; k <= d; ++k) {
      // term binom(d, k) x^k mu^(d-k)
      shifted[k] += F.from_fraction(binom, 1) * c[i] * mu.pow(static_cast<std::uint32_t>(d - k));
      binom = binom * static_cast<unsigned long>(d - k) / static_cast<unsigned long>(k + 1);
    }
  }
  auto c2 = charpoly_berkowitz(P);
  bool same = true;
  for (std::size_t k = 0; k <= n; ++k) same = same && R.equal(shifted[k], c2[n - k]);
  return GspResult{hp, mu, R.reduce(tr2).is_zero(), same};
}

// ---------------------------------------------------------------------------
// Closed-form numerics.

enum class Group { GL, SL, Sp, GSp };

inline Group parse_group(const std::string& s) {
  if (s == "GL") return Group::GL;
  if (s == "SL") return Group::SL;
  if (s == "Sp") return Group::Sp;
  if (s == "GSp") return Group::GSp;
  throw std::invalid_argument("unknown group tag '" + s + "'");
}
inline std::string to_string(Group g) {
  switch (g) {
    case Group::GL: return "GL";
    case Group::SL: return "SL";
    case Group::Sp: return "Sp";
    default: return "GSp";
  }
}

struct DegreeRecord {
  std::int64_t cover_degree;  // degree of the spectral cover over the base curve
  std::int64_t d_prime;       // degree of the spectral line bundle
  std::int64_t chi;           // Euler characteristic of the spectral curve
  std::int64_t deg_omega;     // degree of its dualizing sheaf
};

/// For Sp and GSp the profile's r is half the rank; for GSp the profile's d is
/// the degree of the multiplier line bundle.
inline DegreeRecord degree_formulas(const NumericProfile& p, Group G) {
  const std::int64_t n = (G == Group::Sp || G == Group::GSp) ? 2 * p.r : p.r;
  const std::int64_t ram = n * (n - 1) / 2 * p.l;
  DegreeRecord out{};
  out.cover_degree = n;
  out.chi = n * (1 - p.g) - ram;
  out.deg_omega = 2 * n * (p.g - 1) + 2 * ram;
  switch (G) {
    case Group::GL: out.d_prime = p.d + ram; break;
    case Group::SL: out.d_prime = ram; break;
    case Group::Sp: out.d_prime = p.r * (2 * p.r - 1) * p.l; break;
    case Group::GSp: out.d_prime = p.r * p.d + p.r * (2 * p.r - 1) * p.l; break;
  }
  return out;
}

/// sum rk_i m_i d_i / sum m_i d_i.
inline mpq_class polarized_rank(const std::vector<mpq_class>& ranks, const std::vector<std::int64_t>& mults, const std::vector<std::int64_t>& degs) {
  if (ranks.size() != mults.size() || ranks.size() != degs.size()) throw DimensionError("rank, multiplicity and degree lists differ in length");
  mpq_class num = 0;
  mpz_class den = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    mpz_class w = mpz_class(static_cast<long>(mults[i])) * mpz_class(static_cast<long>(degs[i]));
    num += ranks[i] * mpq_class(w);
    den += w;
  }
  if (den <= 0) throw std::domain_error("polarized weight sum must be positive");
  mpq_class out = num / mpq_class(den);
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Conjugacy search over F_p[t]: g with g Phi = Phi' g and det g a nonzero constant.

struct ConjugacyResult {
  bool found = false;
  Matrix<UniPoly> g;
  std::uint32_t bound = 0;
  std::uint32_t degree = 0;
  std::string reason;
};

inline ConjugacyResult find_conjugator(const Matrix<UniPoly>& phi, const Matrix<UniPoly>& phi2, std::uint64_t seed = 1,
                                       std::optional<std::uint32_t> bound = std::nullopt, int trials = 32) {
  ConjugacyResult out;
  const Field& F = phi(0, 0).field();
  const std::size_t n = phi.rows();
  if (phi2.rows() != n) throw DimensionError("conjugacy search between matrices of different size");
  out.bound = bound ? *bound : 2 * std::max(detail::max_entry_degree(phi), detail::max_entry_degree(phi2));
  if (!F.is_prime()) {
    out.reason = "conjugacy search runs over F_p only";
    return out;
  }
  const std::uint64_t p = F.characteristic();
  auto res = [&](const FieldElem& c) { return static_cast<std::uint32_t>(c.residue()); };
  const std::uint32_t md = std::max(detail::max_entry_degree(phi), detail::max_entry_degree(phi2));
  std::mt19937_64 rng(seed);
  for (std::uint32_t D = 0; D <= out.bound; ++D) {
    const std::size_t nu = n * n * (D + 1);
    auto var = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * (D + 1) + k; };
    std::vector<std::vector<std::uint32_t>> rows;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::uint32_t e = 0; e <= D + md; ++e) {
          std::vector<std::uint32_t> row(nu, 0);
          bool any = false;
          for (std::size_t l = 0; l < n; ++l)
            for (std::uint32_t k = 0; k <= D && k <= e; ++k) {
              std::uint32_t a = res(phi(l, j).coeff(e - k));   // g_il * Phi_lj
              std::uint32_t b = res(phi2(i, l).coeff(e - k));  // Phi'_il * g_lj
              if (a) {
                auto& x = row[var(i, l, k)];
                x = static_cast<std::uint32_t>((x + a) % p);
                any = true;
              }
              if (b) {
                auto& x = row[var(l, j, k)];
                x = static_cast<std::uint32_t>((x + p - b) % p);
                any = true;
              }
            }
          if (any) rows.push_back(std::move(row));
        }
    auto ker = kernel_mod_p(rows, nu, p);
    if (ker.empty()) continue;
    auto build = [&](const std::vector<std::uint64_t>& w) {
      Matrix<UniPoly> g(n, n, UniPoly(F));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<FieldElem> cs;
          for (std::uint32_t k = 0; k <= D; ++k) cs.push_back(F.from_int(static_cast<std::int64_t>(w[var(i, j, k)] % p)));
          g(i, j) = UniPoly(F, cs);
        }
      return g;
    };
    auto try_vec = [&](const std::vector<std::uint64_t>& w) {
      Matrix<UniPoly> g = build(w);
      UniPoly d = det_bareiss(g);
      if (!d.is_unit()) return false;
      if (!(g * phi == phi2 * g)) return false;
      out.found = true;
      out.g = g;
      out.degree = D;
      return true;
    };
    for (const auto& v : ker)
      if (try_vec(std::vector<std::uint64_t>(v.begin(), v.end()))) return out;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::uint64_t> w(nu, 0);
      for (const auto& v : ker) {
        std::uint64_t c = rng() % p;
        for (std::size_t k = 0; k < nu; ++k) w[k] = (w[k] + c * v[k]) % p;
      }
      if (try_vec(w)) return out;
    }
  }
  out.reason = "no invertible solution of degree <= " + std::to_string(out.bound);
  return out;
}

}  // namespace specchart
