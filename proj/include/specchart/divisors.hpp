#pragma once

// Generalized divisors on a chart, written D = div(I) - div(f) with I an ideal
// containing a regular element and f regular. Direct images go through the
// 0-th Fitting ideal of S/I as a module over the base.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "cover.hpp"

namespace specchart {

inline bool ring_is_regular(const RingPtr& R, const MultiPoly& f) {
  if (R->is_polynomial_ring()) return !f.is_zero();
  return is_regular(R, f);
}

class GeneralizedDivisor {
 public:
  GeneralizedDivisor(Ideal effective, std::optional<MultiPoly> negative = std::nullopt)
      : I_(std::move(effective)), f_(negative ? I_.ring()->reduce(*negative) : I_.ring()->one()) {
    const auto& R = I_.ring();
    if (!ring_is_regular(R, f_)) throw DegenerateError("negative part must be a regular element");
    if (I_.is_zero()) throw DegenerateError("effective part is the zero ideal");
    if (artinian_dim(I_).infinite) throw DegenerateError("effective part does not cut out a finite set of points");
    if (!f_.is_constant()) {
      // D is effective when (f) contains I; then D = div(I : f).
      if (Ideal::principal(R, f_).contains(I_)) {
        I_ = ideal_colon(I_, f_);
        f_ = R->one();
      }
    } else {
      f_ = R->one();
    }
  }

  static GeneralizedDivisor zero(const RingPtr& R) { return GeneralizedDivisor(Ideal::unit(R)); }
  static GeneralizedDivisor principal(const RingPtr& R, const MultiPoly& f) { return GeneralizedDivisor(Ideal::principal(R, f)); }

  const RingPtr& ring() const noexcept { return I_.ring(); }
  const Ideal& effective_part() const noexcept { return I_; }
  const MultiPoly& negative_part() const noexcept { return f_; }
  bool is_effective() const { return f_.is_constant(); }
  bool is_zero_divisor_class() const { return I_.is_unit() && f_.is_constant(); }

  /// I * ((c) : I) = (c) for a regular c in I.
  bool is_cartier() const {
    if (I_.is_unit()) return true;
    const auto& R = ring();
    std::optional<MultiPoly> c;
    for (const auto& g : I_.canonical_gens())
      if (ring_is_regular(R, g)) {
        c = g;
        break;
      }
    if (!c) {
      for (const auto& g : I_.gens())
        if (ring_is_regular(R, g)) {
          c = g;
          break;
        }
    }
    if (!c) throw DegenerateError("no regular generator found for the Cartier test");
    Ideal cI = Ideal::principal(R, *c);
    return ideal_product(I_, ideal_colon(cI, I_)) == cI;
  }

  std::string to_string() const {
    std::string s = I_.to_string();
    if (!f_.is_constant()) s += " - (" + ring()->format(f_) + ")";
    return s;
  }

  friend bool operator==(const GeneralizedDivisor& a, const GeneralizedDivisor& b) {
    return ideal_product(a.I_, Ideal::principal(a.ring(), b.f_)) == ideal_product(b.I_, Ideal::principal(b.ring(), a.f_));
  }
  friend bool operator!=(const GeneralizedDivisor& a, const GeneralizedDivisor& b) { return !(a == b); }

 private:
  Ideal I_;
  MultiPoly f_;
};

inline GeneralizedDivisor divisor_sum(const GeneralizedDivisor& a, const GeneralizedDivisor& b) {
  return GeneralizedDivisor(ideal_product(a.effective_part(), b.effective_part()), a.negative_part() * b.negative_part());
}

/// n * D.
inline GeneralizedDivisor divisor_multiple(const GeneralizedDivisor& D, unsigned n) {
  GeneralizedDivisor out = GeneralizedDivisor::zero(D.ring());
  for (unsigned i = 0; i < n; ++i) out = divisor_sum(out, D);
  return out;
}

/// Presentation of S/I over the base: columns are coordinates of g * b_j.
inline Matrix<MultiPoly> quotient_presentation(const CoverChart& S, const Ideal& I) {
  const std::size_t n = S.degree();
  const auto gens = I.gens();
  Matrix<MultiPoly> M(n, n * gens.size(), S.base()->zero());
  for (std::size_t k = 0; k < gens.size(); ++k)
    for (std::size_t j = 0; j < n; ++j) M.set_col(k * n + j, S.coords(gens[k] * S.basis_element(j)));
  return M;
}

/// Fitt_0 from all maximal minors.
inline Ideal fitting_ideal_minors(const CoverChart& S, const Matrix<MultiPoly>& M) {
  const std::size_t n = M.rows(), m = M.cols();
  const auto& R = S.base();
  if (m < n) return Ideal::zero(R);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<MultiPoly> minors;
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  for (;;) {
    MultiPoly d = R->reduce(S.det(M.submatrix(rows, cols)));
    if (!d.is_zero()) minors.push_back(d);
    // next combination
    std::size_t i = n;
    while (i > 0 && cols[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++cols[i - 1];
    for (std::size_t j = i; j < n; ++j) cols[j] = cols[j - 1] + 1;
  }
  return Ideal(R, minors);
}

/// Fitt_0 over k[t]: product of the Smith invariants (zero ideal when rank-deficient).
inline Ideal fitting_ideal_smith(const CoverChart& S, const Matrix<MultiPoly>& M) {
  if (!S.base_is_k_t()) throw UnsupportedError("Smith route needs the base chart k[t]");
  const auto& R = S.base();
  auto U = M.map([](const MultiPoly& e) { return e.to_uni(0); });
  auto sm = smith_normal_form(U, S.field());
  if (sm.invariants.size() < M.rows()) return Ideal::zero(R);
  UniPoly d = UniPoly::constant(S.field().one());
  for (const auto& x : sm.invariants) d = d * x;
  return Ideal::principal(R, R->from_uni(d, 0));
}

enum class FittingRoute { Auto, Minors, Smith };

inline GeneralizedDivisor direct_image(const CoverChart& S, const GeneralizedDivisor& D, FittingRoute route = FittingRoute::Auto) {
  if (!D.ring()->same_as(*S.ring())) throw RingMismatch("divisor does not live on the cover");
  const auto& R = S.base();
  Ideal fitt = Ideal::unit(R);
  if (!D.effective_part().is_unit()) {
    auto M = quotient_presentation(S, D.effective_part());
    bool smith = route == FittingRoute::Smith || (route == FittingRoute::Auto && S.base_is_k_t());
    fitt = smith ? fitting_ideal_smith(S, M) : fitting_ideal_minors(S, M);
  }
  MultiPoly neg = R->one();
  if (!D.negative_part().is_constant()) {
    neg = S.element_norm(D.negative_part());
    if (S.base_is_k_t()) neg = R->from_uni(neg.to_uni(0).monic(), 0);
  }
  return GeneralizedDivisor(fitt, neg);
}

inline GeneralizedDivisor inverse_image(const CoverChart& S, const GeneralizedDivisor& D) {
  if (!D.ring()->same_as(*S.base())) throw RingMismatch("divisor does not live on the base");
  std::vector<MultiPoly> g;
  for (const auto& x : D.effective_part().gens()) g.push_back(S.embed(x));
  return GeneralizedDivisor(Ideal(S.ring(), g), S.embed(D.negative_part()));
}

inline std::int64_t chart_degree(const GeneralizedDivisor& D) {
  Dimension a = artinian_dim(D.effective_part());
  Dimension b = artinian_dim(Ideal::principal(D.ring(), D.negative_part()));
  if (a.infinite || b.infinite) throw DegreeUndefined("quotient is not Artinian");
  return static_cast<std::int64_t>(a.value) - static_cast<std::int64_t>(b.value);
}

enum class LocalRoute { Truncation, Saturation };

inline std::int64_t degree_at_point(const GeneralizedDivisor& D, const Ideal& m, LocalRoute route = LocalRoute::Truncation) {
  if (!is_maximal(m)) throw NotMaximalError("ideal " + m.to_string() + " is not maximal");
  auto local = [&](const Ideal& I) {
    return static_cast<std::int64_t>(route == LocalRoute::Truncation ? local_dim(I, m) : local_dim_by_saturation(I, m));
  };
  return local(D.effective_part()) - local(Ideal::principal(D.ring(), D.negative_part()));
}

/// Maximal ideals where D has nonzero multiplicity or its parts are supported.
inline std::vector<Ideal> divisor_support(const GeneralizedDivisor& D) {
  return maximal_ideals(ideal_product(D.effective_part(), Ideal::principal(D.ring(), D.negative_part())));
}

struct PreimageResult {
  GeneralizedDivisor divisor;
  std::vector<std::string> transcript;
};

namespace detail {

/// Sort key for points: coordinates of the cover variables when rational.
inline std::string point_key(const CoverChart& S, const Ideal& m) {
  std::string key = std::to_string(artinian_dim(m).value) + "|";
  for (std::size_t i = 0; i < S.cover_vars(); ++i) {
    MultiPoly r = m.normal_form(S.var(i));
    if (r.is_constant() && S.field().is_prime()) {
      std::uint64_t v = r.is_zero() ? 0 : r.constant_term().residue();
      std::string s = std::to_string(v);
      key += std::string(20 - s.size(), '0') + s + ",";
    } else {
      key += "~" + m.to_string() + ",";
    }
  }
  return key;
}

}  // namespace detail

/// Effective D on the cover with direct_image(D) = E, built from powers of
/// fiber points whose residue degree fits the multiplicity of each factor of E.
inline PreimageResult find_preimage_divisor(const CoverChart& S, const GeneralizedDivisor& E) {
  if (!S.base_is_k_t()) throw UnsupportedError("preimage search needs the base chart k[t]");
  if (!E.is_effective()) throw std::invalid_argument("preimage search needs an effective divisor");
  if (!E.ring()->same_as(*S.base())) throw RingMismatch("divisor does not live on the base");
  std::vector<std::string> log;
  auto gens = E.effective_part().canonical_gens();
  if (gens.size() != 1) throw std::invalid_argument("base divisor is not principal");
  UniPoly e = gens[0].to_uni(0).monic();
  GeneralizedDivisor D = GeneralizedDivisor::zero(S.ring());
  if (e.is_one()) {
    log.push_back("E = (1): preimage is the zero divisor");
    return {D, log};
  }
  for (const auto& [q, k] : factor(e)) {
    const std::size_t target = static_cast<std::size_t>(k) * static_cast<std::size_t>(q.degree());
    std::string qs = q.to_string(S.base()->var_names()[0]);
    Ideal fiber(S.ring(), {S.embed(S.base()->from_uni(q, 0))});
    auto pts = maximal_ideals(fiber);
    std::sort(pts.begin(), pts.end(), [&](const Ideal& a, const Ideal& b) { return detail::point_key(S, a) < detail::point_key(S, b); });
    bool placed = false;
    for (const auto& m : pts) {
      std::size_t rd = artinian_dim(m).value;
      if (rd % static_cast<std::size_t>(q.degree()) != 0 || target % rd != 0) {
        log.push_back("factor (" + qs + ")^" + std::to_string(k) + ": point " + m.to_string() + " has residue degree " +
                      std::to_string(rd) + ", skipped");
        continue;
      }
      Ideal P = m;
      for (std::size_t d = 1; d <= target; ++d) {
        std::size_t len = local_dim(P, m);
        if (len == target) {
          log.push_back("factor (" + qs + ")^" + std::to_string(k) + ": point " + m.to_string() + " to the power " + std::to_string(d));
          D = divisor_sum(D, GeneralizedDivisor(P));
          placed = true;
          break;
        }
        if (len > target) break;
        P = ideal_product(P, m);
      }
      if (placed) break;
    }
    if (!placed)
      throw std::runtime_error("no fiber point over (" + qs + ") admits local degree " + std::to_string(target) + " over " +
                               S.field().name());
  }
  GeneralizedDivisor img = direct_image(S, D);
  if (img != E) throw std::logic_error("constructed preimage failed verification: got " + img.to_string());
  log.push_back("verified: direct image " + img.to_string());
  return {D, log};
}

}  // namespace specchart
