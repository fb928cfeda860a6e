#pragma once

// Quotient rings k[vars]/(relations) and their ideals. Every ideal carries a
// reduced Groebner basis of (generators + relations).

#include <algorithm>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "groebner.hpp"
#include "matrix.hpp"
#include "unipoly.hpp"

namespace specchart {

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegreeUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotMaximalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct RingMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class QuotientRing {
 public:
  QuotientRing(Field F, std::vector<std::string> vars, std::vector<MultiPoly> relations = {})
      : F_(F), names_(std::move(vars)) {
    for (auto& r : relations) {
      if (r.nvars() != names_.size()) throw DimensionError("relation arity does not match the variable list");
      if (!r.is_zero()) rel_.push_back(std::move(r));
    }
    rel_gb_ = groebner_basis(rel_, MonomialOrder::grevlex());
    rel_sorted_ = sorted_basis(rel_gb_, MonomialOrder::grevlex());
  }

  static std::shared_ptr<const QuotientRing> make(Field F, std::vector<std::string> vars, std::vector<MultiPoly> relations = {}) {
    return std::make_shared<const QuotientRing>(F, std::move(vars), std::move(relations));
  }

  const Field& field() const noexcept { return F_; }
  std::size_t nvars() const noexcept { return names_.size(); }
  const std::vector<std::string>& var_names() const noexcept { return names_; }
  const std::vector<MultiPoly>& relations() const noexcept { return rel_; }
  const std::vector<MultiPoly>& relation_basis() const noexcept { return rel_gb_; }
  bool is_polynomial_ring() const noexcept { return rel_gb_.empty(); }
  bool is_univariate_polynomial_ring() const noexcept { return names_.size() == 1 && rel_gb_.empty(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  MultiPoly var(std::size_t i) const { return MultiPoly::variable(F_, nvars(), i); }
  MultiPoly constant(const FieldElem& c) const { return MultiPoly::constant(F_, nvars(), c); }
  MultiPoly from_int(std::int64_t c) const { return MultiPoly::constant(F_, nvars(), c); }
  MultiPoly zero() const { return MultiPoly(F_, nvars()); }
  MultiPoly one() const { return from_int(1); }
  MultiPoly from_uni(const UniPoly& u, std::size_t var_index) const { return MultiPoly::from_uni(u, nvars(), var_index); }

  MultiPoly reduce(const MultiPoly& f) const {
    if (rel_gb_.empty()) return f;
    return reduce_by_sorted(f, rel_sorted_, MonomialOrder::grevlex());
  }
  bool equal(const MultiPoly& a, const MultiPoly& b) const { return reduce(a - b).is_zero(); }
  std::string format(const MultiPoly& f) const { return reduce(f).to_string(names_); }

  bool same_as(const QuotientRing& o) const {
    if (this == &o) return true;
    if (!(F_ == o.F_) || names_ != o.names_ || rel_gb_.size() != o.rel_gb_.size()) return false;
    for (std::size_t i = 0; i < rel_gb_.size(); ++i)
      if (!(rel_gb_[i] == o.rel_gb_[i])) return false;
    return true;
  }

 private:
  Field F_;
  std::vector<std::string> names_;
  std::vector<MultiPoly> rel_;
  std::vector<MultiPoly> rel_gb_;
  std::vector<gb::SortedPoly> rel_sorted_;
};

using RingPtr = std::shared_ptr<const QuotientRing>;

class Ideal {
 public:
  Ideal(RingPtr R, std::vector<MultiPoly> gens, MonomialOrder ord = MonomialOrder::grevlex()) : R_(std::move(R)), ord_(ord) {
    for (auto& g : gens) {
      if (g.nvars() != R_->nvars()) throw DimensionError("generator arity does not match the ring");
      MultiPoly r = R_->reduce(g);
      if (!r.is_zero()) gens_.push_back(std::move(r));
    }
    std::vector<MultiPoly> all = gens_;
    all.insert(all.end(), R_->relations().begin(), R_->relations().end());
    gb_ = groebner_basis(all, ord_);
    sorted_ = std::make_shared<const std::vector<gb::SortedPoly>>(sorted_basis(gb_, ord_));
  }

  static Ideal unit(RingPtr R) { return Ideal(R, {R->one()}); }
  static Ideal zero(RingPtr R) { return Ideal(R, {}); }
  static Ideal principal(RingPtr R, const MultiPoly& f) { return Ideal(R, {f}); }

  const RingPtr& ring() const noexcept { return R_; }
  const std::vector<MultiPoly>& gens() const noexcept { return gens_; }
  /// Reduced Groebner basis of generators + relations.
  const std::vector<MultiPoly>& basis() const noexcept { return gb_; }
  const MonomialOrder& order() const noexcept { return ord_; }

  MultiPoly normal_form(const MultiPoly& f) const { return reduce_by_sorted(f, *sorted_, ord_); }
  bool contains(const MultiPoly& f) const { return normal_form(f).is_zero(); }
  bool contains(const Ideal& J) const {
    check_same(J);
    for (const auto& g : J.gens_)
      if (!contains(g)) return false;
    return true;
  }
  bool is_unit() const { return gb_.size() == 1 && gb_[0].is_constant(); }
  bool is_zero() const { return gens_.empty(); }

  Ideal with_order(const MonomialOrder& ord) const { return Ideal(R_, gens_, ord); }

  /// Basis elements not already in the relation ideal; the canonical
  /// generator list used for display and equality.
  std::vector<MultiPoly> canonical_gens() const {
    if (is_unit()) return {R_->one()};
    std::vector<MultiPoly> out;
    for (const auto& g : gb_)
      if (!R_->reduce(g).is_zero()) out.push_back(g);
    return out;
  }

  /// canonical_gens() minus elements lying in the ideal of strictly
  /// lower-degree ones (modulo the relations).
  std::vector<MultiPoly> display_gens() const {
    auto g = canonical_gens();
    if (R_->is_polynomial_ring() || g.size() < 2) return g;
    std::vector<bool> keep(g.size(), true);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::vector<MultiPoly> lower = R_->relations();
      bool any = false;
      for (std::size_t j = 0; j < g.size(); ++j)
        if (keep[j] && g[j].total_degree() < g[i].total_degree()) {
          lower.push_back(g[j]);
          any = true;
        }
      if (any && reduce_by(g[i], groebner_basis(lower, ord_), ord_).is_zero()) keep[i] = false;
    }
    std::vector<MultiPoly> out;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (keep[i]) out.push_back(g[i]);
    return out;
  }

  std::string to_string() const {
    auto g = display_gens();
    if (g.empty()) return "(0)";
    std::string s = "(";
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) s += ", ";
      s += g[i].to_string(R_->var_names(), ord_);
    }
    return s + ")";
  }

  friend bool operator==(const Ideal& a, const Ideal& b) {
    a.check_same(b);
    if (a.ord_ == b.ord_) {
      if (a.gb_.size() != b.gb_.size()) return false;
      for (std::size_t i = 0; i < a.gb_.size(); ++i)
        if (!(a.gb_[i] == b.gb_[i])) return false;
      return true;
    }
    return a.contains(b) && b.contains(a);
  }
  friend bool operator!=(const Ideal& a, const Ideal& b) { return !(a == b); }

  void check_same(const Ideal& o) const {
    if (!R_->same_as(*o.R_)) throw RingMismatch("ideals live in different rings");
  }

 private:
  RingPtr R_;
  MonomialOrder ord_;
  std::vector<MultiPoly> gens_;
  std::vector<MultiPoly> gb_;
  std::shared_ptr<const std::vector<gb::SortedPoly>> sorted_;
};

namespace detail {

/// Elements of the ideal generated by `gens` involving none of the first k variables,
/// re-embedded without them.
inline std::vector<MultiPoly> eliminate_leading(const std::vector<MultiPoly>& gens, std::size_t k) {
  std::vector<MultiPoly> out;
  if (gens.empty()) return out;
  const std::size_t n = gens[0].nvars();
  std::vector<std::size_t> back(n, 0);
  for (std::size_t j = k; j < n; ++j) back[j] = j - k;
  for (const auto& g : groebner_basis(gens, MonomialOrder::block(k)))
    if (g.uses_only(k, n)) out.push_back(g.remap(n - k, back));
  return out;
}

/// Generators of (A) ∩ (B) in the ambient polynomial ring.
inline std::vector<MultiPoly> intersect_polys(const std::vector<MultiPoly>& A, const std::vector<MultiPoly>& B, const Field& F,
                                              std::size_t n) {
  if (A.empty() || B.empty()) return {};
  std::vector<std::size_t> up(n);
  for (std::size_t i = 0; i < n; ++i) up[i] = i + 1;
  MultiPoly w = MultiPoly::variable(F, n + 1, 0);
  MultiPoly one_minus_w = MultiPoly::constant(F, n + 1, 1) - w;
  std::vector<MultiPoly> gens;
  for (const auto& a : A) gens.push_back(w * a.remap(n + 1, up));
  for (const auto& b : B) gens.push_back(one_minus_w * b.remap(n + 1, up));
  return eliminate_leading(gens, 1);
}

}  // namespace detail

inline Ideal ideal_sum(const Ideal& I, const Ideal& J) {
  I.check_same(J);
  auto g = I.gens();
  g.insert(g.end(), J.gens().begin(), J.gens().end());
  return Ideal(I.ring(), g, I.order());
}

inline Ideal ideal_product(const Ideal& I, const Ideal& J) {
  I.check_same(J);
  std::vector<MultiPoly> g;
  for (const auto& a : I.gens())
    for (const auto& b : J.gens()) g.push_back(a * b);
  return Ideal(I.ring(), g, I.order());
}

inline Ideal ideal_power(const Ideal& I, unsigned k) {
  Ideal out = Ideal::unit(I.ring());
  for (unsigned i = 0; i < k; ++i) out = ideal_product(out, I);
  return out;
}

inline Ideal ideal_intersection(const Ideal& I, const Ideal& J) {
  I.check_same(J);
  const auto& R = I.ring();
  return Ideal(R, detail::intersect_polys(I.basis(), J.basis(), R->field(), R->nvars()), I.order());
}

/// (I : f) = { g : g f ∈ I }.
inline Ideal ideal_colon(const Ideal& I, const MultiPoly& f) {
  const auto& R = I.ring();
  if (I.contains(f)) return Ideal::unit(R);
  std::vector<MultiPoly> out;
  for (const auto& k : detail::intersect_polys(I.basis(), {f}, R->field(), R->nvars())) out.push_back(exact_div(k, f));
  return Ideal(R, out, I.order());
}

/// (I : J) = { g : g J ⊆ I }.
inline Ideal ideal_colon(const Ideal& I, const Ideal& J) {
  I.check_same(J);
  std::optional<Ideal> acc;
  for (const auto& g : J.gens()) {
    if (I.contains(g)) continue;
    Ideal c = ideal_colon(I, g);
    acc = acc ? ideal_intersection(*acc, c) : c;
  }
  return acc ? *acc : Ideal::unit(I.ring());
}

struct Saturation {
  Ideal ideal;
  unsigned exponent;
};

/// I : m^∞ together with the first N with I : m^N = I : m^(N+1).
inline Saturation saturate(const Ideal& I, const Ideal& m, unsigned max_steps = 256) {
  Ideal K = I;
  for (unsigned N = 0; N < max_steps; ++N) {
    Ideal next = ideal_colon(K, m);
    if (next == K) return {K, N};
    K = std::move(next);
  }
  throw std::runtime_error("saturation did not stabilize");
}

/// Whether f is a nonzerodivisor: ((0) : f) = (0).
inline bool is_regular(const RingPtr& R, const MultiPoly& f) {
  if (R->reduce(f).is_zero()) return false;
  return ideal_colon(Ideal::zero(R), f).canonical_gens().empty();
}

struct Dimension {
  bool infinite = false;
  std::size_t value = 0;
  std::string to_string() const { return infinite ? "INFINITE" : std::to_string(value); }
  friend bool operator==(const Dimension& a, const Dimension& b) { return a.infinite == b.infinite && a.value == b.value; }
};

namespace detail {

/// Per-variable exponent bound from pure powers among leading monomials; nullopt when unbounded.
inline std::optional<std::vector<std::uint32_t>> staircase_bounds(const Ideal& I) {
  const std::size_t n = I.ring()->nvars();
  std::vector<std::uint32_t> bound(n, 0);
  std::vector<bool> found(n, false);
  for (const auto& g : I.basis()) {
    const Monomial& lm = g.leading_monomial(I.order());
    std::size_t nz = 0, which = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (lm[i]) {
        ++nz;
        which = i;
      }
    if (nz == 1 && (!found[which] || lm[which] < bound[which])) {
      found[which] = true;
      bound[which] = lm[which];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!found[i]) return std::nullopt;
  return bound;
}

}  // namespace detail

/// Monomials outside the leading-term ideal, increasing in the ideal's order.
inline std::vector<Monomial> standard_monomials(const Ideal& I) {
  if (I.is_unit()) return {};
  auto bounds = detail::staircase_bounds(I);
  if (!bounds) throw DegreeUndefined("quotient is not Artinian");
  const std::size_t n = bounds->size();
  std::vector<Monomial> lms;
  for (const auto& g : I.basis()) lms.push_back(g.leading_monomial(I.order()));
  std::vector<Monomial> out;
  Monomial cur(n, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      for (const auto& l : lms)
        if (monomial_divides(l, cur)) return;
      out.push_back(cur);
      return;
    }
    for (std::uint32_t e = 0; e < (*bounds)[i]; ++e) {
      cur[i] = e;
      self(self, i + 1);
    }
    cur[i] = 0;
  };
  if (n == 0) {
    out.push_back(cur);
  } else {
    rec(rec, 0);
  }
  std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return I.order().less(a, b); });
  return out;
}

/// dim_k of ambient / (I + relations).
inline Dimension artinian_dim(const Ideal& I) {
  if (I.is_unit()) return {false, 0};
  if (!detail::staircase_bounds(I)) return {true, 0};
  return {false, standard_monomials(I).size()};
}

/// The finite-dimensional algebra ambient / I, with coordinates on standard monomials.
class FiniteAlgebra {
 public:
  explicit FiniteAlgebra(Ideal I) : I_(std::move(I)), basis_(standard_monomials(I_)) {}

  const Ideal& ideal() const noexcept { return I_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<Monomial>& basis() const noexcept { return basis_; }

  std::vector<FieldElem> coords(const MultiPoly& f) const {
    const Field& F = I_.ring()->field();
    std::vector<FieldElem> v(dim(), F.zero());
    MultiPoly r = I_.normal_form(f);
    for (const auto& [m, c] : r.terms()) {
      auto it = std::lower_bound(basis_.begin(), basis_.end(), m, [&](const Monomial& a, const Monomial& b) { return I_.order().less(a, b); });
      if (it == basis_.end() || *it != m) throw std::logic_error("normal form left the standard monomials");
      v[static_cast<std::size_t>(it - basis_.begin())] = c;
    }
    return v;
  }

  MultiPoly element(const std::vector<FieldElem>& c) const {
    MultiPoly f = I_.ring()->zero();
    for (std::size_t i = 0; i < dim(); ++i)
      if (!c[i].is_zero()) f.add_term(basis_[i], c[i]);
    return f;
  }

  /// Minimal polynomial of multiplication by f.
  UniPoly min_poly(const MultiPoly& f) const {
    const Field& F = I_.ring()->field();
    if (dim() == 0) return UniPoly::constant(F.one());
    std::vector<std::vector<FieldElem>> cols{coords(I_.ring()->one())};
    MultiPoly p = I_.ring()->one();
    for (std::size_t k = 1; k <= dim(); ++k) {
      p = I_.normal_form(p * f);
      auto v = coords(p);
      Matrix<FieldElem> M(dim(), k, F.zero());
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < dim(); ++i) M(i, j) = cols[j][i];
      if (auto sol = solve(M, v)) {
        std::vector<FieldElem> c(k + 1, F.zero());
        for (std::size_t i = 0; i < k; ++i) c[i] = -(*sol)[i];
        c[k] = F.one();
        return UniPoly(F, c);
      }
      cols.push_back(std::move(v));
    }
    throw std::logic_error("minimal polynomial exceeds the algebra dimension");
  }

 private:
  Ideal I_;
  std::vector<Monomial> basis_;
};

/// u(a) computed by Horner's rule.
inline MultiPoly eval_uni_at(const UniPoly& u, const MultiPoly& a) {
  MultiPoly r = a.zero_like();
  for (std::size_t i = u.coeffs().size(); i-- > 0;) r = r * a + MultiPoly::constant(a.field(), a.nvars(), u.coeffs()[i]);
  return r;
}

inline UniPoly squarefree_part(const UniPoly& f) {
  if (f.degree() <= 0) return f.is_zero() ? f : f.one_like();
  if (f.field().is_rational()) return exact_div(f, gcd(f, f.derivative())).monic();
  UniPoly out = f.one_like();
  for (const auto& [q, e] : squarefree_decomposition(f.monic())) out = out * q;
  return out;
}

/// Radical of a zero-dimensional ideal (adds squarefree parts of eliminants).
inline Ideal radical_zero_dim(const Ideal& I) {
  if (I.is_unit()) return I;
  FiniteAlgebra A(I);
  std::vector<MultiPoly> gens = I.gens();
  bool changed = false;
  const auto& R = I.ring();
  for (std::size_t i = 0; i < R->nvars(); ++i) {
    UniPoly mu = A.min_poly(R->var(i));
    UniPoly sq = squarefree_part(mu);
    if (sq.degree() < mu.degree()) {
      gens.push_back(R->from_uni(sq, i));
      changed = true;
    }
  }
  return changed ? Ideal(R, gens, I.order()) : I;
}

namespace detail {

inline void split_maximal(const Ideal& J, std::mt19937_64& rng, std::vector<Ideal>& out, int depth = 0) {
  if (J.is_unit()) return;
  FiniteAlgebra A(J);
  const std::size_t d = A.dim();
  const Field& F = J.ring()->field();
  if (d == 1) {
    out.push_back(J);
    return;
  }
  if (!F.is_prime()) throw UnsupportedError("point enumeration of higher residue degree needs a prime field");
  if (depth > 64) throw std::runtime_error("maximal ideal splitting did not terminate");
  const std::uint64_t p = F.characteristic();
  for (int attempt = 0; attempt < 60; ++attempt) {
    std::vector<FieldElem> c(d, F.zero());
    for (std::size_t i = 0; i < d; ++i) c[i] = F.from_int(static_cast<std::int64_t>(rng() % p));
    MultiPoly a = A.element(c);
    UniPoly mu = A.min_poly(a);
    auto fs = factor(mu);
    if (fs.size() >= 2) {
      for (const auto& [h, e] : fs) {
        auto g = J.gens();
        g.push_back(J.normal_form(eval_uni_at(h, a)));
        split_maximal(Ideal(J.ring(), g, J.order()), rng, out, depth + 1);
      }
      return;
    }
    if (static_cast<std::size_t>(mu.degree()) == d) {
      out.push_back(J);
      return;
    }
  }
  throw std::runtime_error("could not decompose a finite algebra into fields");
}

}  // namespace detail

/// Maximal ideals containing a zero-dimensional ideal, in canonical order.
inline std::vector<Ideal> maximal_ideals(const Ideal& I) {
  std::vector<Ideal> out;
  if (I.is_unit()) return out;
  if (!detail::staircase_bounds(I)) throw DegreeUndefined("support is not finite");
  std::mt19937_64 rng(0x5eedULL);
  detail::split_maximal(radical_zero_dim(I), rng, out);
  std::sort(out.begin(), out.end(), [](const Ideal& a, const Ideal& b) { return a.to_string() < b.to_string(); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool is_maximal(const Ideal& m) {
  if (m.is_unit() || !detail::staircase_bounds(m)) return false;
  auto ms = maximal_ideals(m);
  return ms.size() == 1 && ms[0] == m;
}

/// dim_k of the localization of ambient/I at m: dim S/(I + m^N) once stable.
inline std::size_t local_dim(const Ideal& I, const Ideal& m, unsigned max_power = 128) {
  if (ideal_sum(I, m).is_unit()) return 0;
  std::size_t prev = 0;
  Ideal mp = m;
  for (unsigned N = 1; N <= max_power; ++N) {
    Dimension d = artinian_dim(ideal_sum(I, mp));
    if (d.infinite) throw DegreeUndefined("local quotient is not Artinian");
    if (N > 1 && d.value == prev) return prev;
    prev = d.value;
    mp = ideal_product(mp, m);
  }
  throw DegreeUndefined("local length did not stabilize");
}

/// Same quantity via saturation: dim S/I - dim S/(I : m^∞).
inline std::size_t local_dim_by_saturation(const Ideal& I, const Ideal& m) {
  Dimension whole = artinian_dim(I);
  if (whole.infinite) throw DegreeUndefined("quotient is not Artinian");
  Dimension away = artinian_dim(saturate(I, m).ideal);
  return whole.value - away.value;
}

}  // namespace specchart
