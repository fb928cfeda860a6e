#pragma once

// A finite free cover S of a base chart R: S = R[x]/(P) with P monic, or an
// explicit basis {1, e_1, ..., e_m} with a multiplication table. Element norms
// and traces, fractional ideals of S, lattice norms and an isomorphism search.

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "parse.hpp"
#include "ring.hpp"
#include "smith.hpp"

namespace specchart {

struct DegenerateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IncompatibleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class CoverForm { Monic, Free };

struct NumericProfile {
  std::int64_t r, g, l, d;
  NumericProfile(std::int64_t r_, std::int64_t g_, std::int64_t l_, std::int64_t d_) : r(r_), g(g_), l(l_), d(d_) {
    if (r < 1) throw std::invalid_argument("rank must be at least 1");
    if (g < 0) throw std::invalid_argument("genus must be non-negative");
  }
};

inline FieldElem random_scalar(const Field& F, std::mt19937_64& rng) {
  if (F.is_prime()) return F.from_int(static_cast<std::int64_t>(rng() % F.characteristic()));
  return F.from_int(static_cast<std::int64_t>(rng() % 19) - 9);
}

class CoverChart;
using CoverPtr = std::shared_ptr<const CoverChart>;

class CoverChart {
 public:
  /// S = R[x]/(x^r + a_1 x^(r-1) + ... + a_r), a_i given in the base ring.
  static std::shared_ptr<CoverChart> monic(RingPtr base, std::string x, std::vector<MultiPoly> a) {
    if (a.empty()) throw DimensionError("cover polynomial needs degree at least 1");
    auto c = std::shared_ptr<CoverChart>(new CoverChart(std::move(base), {std::move(x)}, CoverForm::Monic));
    const std::size_t r = a.size();
    for (auto& ai : a) {
      if (ai.nvars() != c->base_->nvars()) throw DimensionError("coefficient arity does not match the base ring");
      ai = c->base_->reduce(ai);
    }
    c->a_ = a;
    MultiPoly P = c->var(0).pow(static_cast<std::uint32_t>(r));
    for (std::size_t i = 0; i < r; ++i) P += c->embed(a[i]) * c->var(0).pow(static_cast<std::uint32_t>(r - 1 - i));
    for (std::size_t i = 0; i < r; ++i) c->basis_.push_back(Monomial{static_cast<std::uint32_t>(i)});
    c->closure_.push_back(Monomial{static_cast<std::uint32_t>(r)});
    c->finish({P});
    return c;
  }

  /// Free cover with basis {1, e_1, ..., e_m}. `table` holds e_i * e_j for every
  /// i <= j as an expression linear in the e's, written in the ambient ring
  /// (cover names followed by base names).
  static std::shared_ptr<CoverChart> free_basis(RingPtr base, std::vector<std::string> names, const std::map<std::pair<std::size_t, std::size_t>, MultiPoly>& table) {
    if (names.empty()) throw DimensionError("free cover needs at least one basis element besides 1");
    auto c = std::shared_ptr<CoverChart>(new CoverChart(std::move(base), std::move(names), CoverForm::Free));
    const std::size_t m = c->m_;
    c->basis_.push_back(Monomial(m, 0));
    for (std::size_t i = 0; i < m; ++i) {
      Monomial e(m, 0);
      e[i] = 1;
      c->basis_.push_back(e);
    }
    std::vector<MultiPoly> rels;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        auto it = table.find({i, j});
        if (it == table.end()) throw IncompatibleError("multiplication table misses " + c->names_[i] + "*" + c->names_[j]);
        const MultiPoly& v = it->second;
        if (v.nvars() != c->S_names_.size()) throw DimensionError("table entry arity mismatch");
        for (const auto& [mono, coef] : v.terms()) {
          std::uint32_t deg = 0;
          for (std::size_t k = 0; k < m; ++k) deg += mono[k];
          if (deg > 1) throw IncompatibleError("table entries must be linear in the basis");
        }
        rels.push_back(c->var(i) * c->var(j) - v);
        Monomial e(m, 0);
        e[i] += 1;
        e[j] += 1;
        c->closure_.push_back(e);
      }
    c->finish(rels);
    return c;
  }

  const RingPtr& base() const noexcept { return base_; }
  const RingPtr& ring() const noexcept { return S_; }
  const Field& field() const noexcept { return base_->field(); }
  CoverForm form() const noexcept { return form_; }
  std::size_t degree() const noexcept { return basis_.size(); }
  std::size_t cover_vars() const noexcept { return m_; }
  const std::vector<std::string>& cover_names() const noexcept { return names_; }
  bool twist_trivialized() const noexcept { return true; }
  /// a_1..a_r of the monic form.
  const std::vector<MultiPoly>& coefficients() const {
    if (form_ != CoverForm::Monic) throw UnsupportedError("characteristic coefficients need a MONIC cover");
    return a_;
  }
  bool base_is_k_t() const { return base_->is_univariate_polynomial_ring(); }

  MultiPoly var(std::size_t i) const { return MultiPoly::variable(field(), S_names_.size(), i); }
  MultiPoly x() const { return var(0); }
  MultiPoly one() const { return MultiPoly::constant(field(), S_names_.size(), 1); }
  MultiPoly zero() const { return MultiPoly(field(), S_names_.size()); }
  MultiPoly embed(const MultiPoly& r) const { return r.remap(S_names_.size(), up_); }
  MultiPoly basis_element(std::size_t i) const { return MultiPoly::term(field(), pad(basis_[i]), field().one()); }

  void add_alias(std::string name, const MultiPoly& value) { aliases_.emplace_back(std::move(name), value); }
  const std::vector<std::pair<std::string, MultiPoly>>& aliases() const noexcept { return aliases_; }

  /// Parses an element of S; aliases are expanded.
  MultiPoly parse(const std::string& text, std::size_t line = 1, std::size_t col = 1) const {
    std::vector<std::string> names = S_names_;
    for (const auto& [n, v] : aliases_) names.push_back(n);
    MultiPoly f = parse_poly(text, names, field(), line, col);
    if (aliases_.empty()) return S_->reduce(f);
    std::vector<MultiPoly> images;
    for (std::size_t i = 0; i < S_names_.size(); ++i) images.push_back(var(i));
    for (const auto& [n, v] : aliases_) images.push_back(v);
    return S_->reduce(f.substitute(images));
  }
  MultiPoly parse_base(const std::string& text, std::size_t line = 1, std::size_t col = 1) const {
    return parse_poly(text, base_->var_names(), field(), line, col);
  }

  /// Coordinates of f over the free basis, as base-ring elements.
  std::vector<MultiPoly> coords(const MultiPoly& f) const {
    MultiPoly g = reduce_by_sorted(f, coord_sorted_, coord_order_);
    std::vector<MultiPoly> out(degree(), base_->zero());
    for (const auto& [mono, c] : g.terms()) {
      Monomial head(mono.begin(), mono.begin() + static_cast<std::ptrdiff_t>(m_));
      std::size_t idx = degree();
      for (std::size_t i = 0; i < degree(); ++i)
        if (basis_[i] == head) idx = i;
      if (idx == degree()) throw std::logic_error("normal form left the free basis");
      Monomial tail(mono.begin() + static_cast<std::ptrdiff_t>(m_), mono.end());
      out[idx].add_term(tail, c);
    }
    for (auto& o : out) o = base_->reduce(o);
    return out;
  }

  MultiPoly from_coords(const std::vector<MultiPoly>& c) const {
    MultiPoly f = zero();
    for (std::size_t i = 0; i < degree(); ++i)
      if (!c[i].is_zero()) f += embed(c[i]) * basis_element(i);
    return reduce(f);
  }

  MultiPoly reduce(const MultiPoly& f) const { return S_->reduce(f); }
  bool equal(const MultiPoly& a, const MultiPoly& b) const { return S_->equal(a, b); }
  std::string format(const MultiPoly& f) const { return S_->format(f); }
  std::string format_base(const MultiPoly& f) const { return base_->format(f); }

  /// Column j holds the coordinates of f * b_j.
  Matrix<MultiPoly> mult_matrix(const MultiPoly& f) const {
    Matrix<MultiPoly> M(degree(), degree(), base_->zero());
    for (std::size_t j = 0; j < degree(); ++j) M.set_col(j, coords(f * basis_element(j)));
    return M;
  }

  /// Determinant over the base; fraction-free on domains, cofactor otherwise.
  MultiPoly det(const Matrix<MultiPoly>& M) const {
    if (base_is_k_t()) return base_->from_uni(det_bareiss(M.map([](const MultiPoly& e) { return e.to_uni(0); })), 0);
    if (base_->is_polynomial_ring()) return det_bareiss(M);
    return det_cofactor(M, [this](const MultiPoly& e) { return base_->reduce(e); });
  }

  MultiPoly element_norm(const MultiPoly& f) const { return det(mult_matrix(f)); }

  MultiPoly element_trace(const MultiPoly& f) const {
    auto M = mult_matrix(f);
    MultiPoly t = base_->zero();
    for (std::size_t i = 0; i < degree(); ++i) t += M(i, i);
    return base_->reduce(t);
  }

  /// [1, c_1, ..., c_n] with det(X - f) = sum c_i X^(n-i), over the base.
  std::vector<MultiPoly> element_charpoly(const MultiPoly& f) const {
    auto c = charpoly_berkowitz(mult_matrix(f));
    for (auto& e : c) e = base_->reduce(e);
    return c;
  }

  /// adj(f) with f * adj(f) = Nm(f).
  MultiPoly adjugate(const MultiPoly& f) const {
    auto c = element_charpoly(f);
    const std::size_t n = degree();
    MultiPoly acc = zero();
    for (std::size_t k = 0; k < n; ++k) acc = reduce(acc * f + embed(c[k]));
    return (n % 2 == 1) ? acc : -acc;
  }

  bool is_regular_element(const MultiPoly& f) const {
    if (reduce(f).is_zero()) return false;
    if (base_->is_polynomial_ring()) return !element_norm(f).is_zero();
    return is_regular(S_, f);
  }

  /// P(y) for y in S (MONIC form).
  MultiPoly cover_polynomial_at(const MultiPoly& y) const {
    const auto& a = coefficients();
    MultiPoly P = y.pow(static_cast<std::uint32_t>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) P += embed(a[i]) * y.pow(static_cast<std::uint32_t>(a.size() - 1 - i));
    return reduce(P);
  }

 private:
  CoverChart(RingPtr base, std::vector<std::string> names, CoverForm form)
      : base_(std::move(base)), form_(form), names_(std::move(names)), m_(names_.size()), coord_order_(MonomialOrder::block(m_)) {
    for (const auto& n : names_)
      if (base_->index_of(n)) throw IncompatibleError("cover variable '" + n + "' clashes with a base variable");
    S_names_ = names_;
    S_names_.insert(S_names_.end(), base_->var_names().begin(), base_->var_names().end());
    up_.resize(base_->nvars());
    for (std::size_t i = 0; i < base_->nvars(); ++i) up_[i] = m_ + i;
  }

  Monomial pad(const Monomial& head) const {
    Monomial m(S_names_.size(), 0);
    for (std::size_t i = 0; i < m_; ++i) m[i] = head[i];
    return m;
  }

  void finish(std::vector<MultiPoly> defining) {
    std::vector<MultiPoly> rels;
    for (const auto& r : base_->relations()) rels.push_back(embed(r));
    rels.insert(rels.end(), defining.begin(), defining.end());
    coord_gb_ = groebner_basis(rels, coord_order_);
    coord_sorted_ = sorted_basis(coord_gb_, coord_order_);
    // freeness: base relations survive unchanged, every closure monomial is
    // reducible, no basis monomial is
    std::vector<MultiPoly> base_part;
    for (const auto& g : coord_gb_) {
      const Monomial& lm = g.leading_monomial(coord_order_);
      Monomial head(lm.begin(), lm.begin() + static_cast<std::ptrdiff_t>(m_));
      bool zero_head = std::all_of(head.begin(), head.end(), [](std::uint32_t e) { return e == 0; });
      if (zero_head) {
        std::vector<std::size_t> down(S_names_.size(), 0);
        for (std::size_t i = 0; i < base_->nvars(); ++i) down[m_ + i] = i;
        base_part.push_back(g.remap(base_->nvars(), down));
      }
    }
    auto base_gb = groebner_basis(base_->relations(), MonomialOrder::grevlex());
    bool same = base_gb.size() == base_part.size();
    for (std::size_t i = 0; same && i < base_gb.size(); ++i) same = base_gb[i] == base_part[i];
    if (!same) throw IncompatibleError("multiplication table is inconsistent (it imposes relations on the base)");
    for (const auto& cm : closure_) {
      bool hit = false;
      for (const auto& g : coord_gb_)
        if (monomial_divides(g.leading_monomial(coord_order_), pad(cm))) hit = true;
      if (!hit) throw IncompatibleError("multiplication table does not close");
    }
    for (const auto& b : basis_)
      for (const auto& g : coord_gb_)
        if (monomial_divides(g.leading_monomial(coord_order_), pad(b)))
          throw IncompatibleError("multiplication table is inconsistent (basis collapses)");
    S_ = QuotientRing::make(field(), S_names_, rels);
  }

  RingPtr base_;
  CoverForm form_;
  std::vector<std::string> names_;
  std::size_t m_;
  MonomialOrder coord_order_;
  std::vector<std::string> S_names_;
  std::vector<std::size_t> up_;
  std::vector<Monomial> basis_;    // cover-variable parts of the basis monomials
  std::vector<Monomial> closure_;  // products that must reduce
  std::vector<MultiPoly> a_;
  RingPtr S_;
  std::vector<MultiPoly> coord_gb_;
  std::vector<gb::SortedPoly> coord_sorted_;
  std::vector<std::pair<std::string, MultiPoly>> aliases_;
};

// ---------------------------------------------------------------------------

/// A fractional ideal num/den of k[t], monic and coprime.
struct BaseFraction {
  UniPoly num, den;
  BaseFraction(UniPoly n, UniPoly d) {
    if (n.is_zero() || d.is_zero()) throw DegenerateError("degenerate fractional ideal of the base");
    UniPoly g = gcd(n, d);
    num = exact_div(n, g).monic();
    den = exact_div(d, g).monic();
  }
  bool is_unit() const { return num.is_one() && den.is_one(); }
  std::string to_string(const std::string& var) const {
    std::string s = "(" + num.to_string(var) + ")";
    if (!den.is_one()) s += "/(" + den.to_string(var) + ")";
    return s;
  }
  friend bool operator==(const BaseFraction& a, const BaseFraction& b) { return a.num == b.num && a.den == b.den; }
  friend BaseFraction operator*(const BaseFraction& a, const BaseFraction& b) { return {a.num * b.num, a.den * b.den}; }
};

inline Ideal scale_ideal(const Ideal& I, const MultiPoly& f) {
  std::vector<MultiPoly> g;
  for (const auto& x : I.gens()) g.push_back(x * f);
  return Ideal(I.ring(), g, I.order());
}

namespace detail {

inline std::optional<MultiPoly> find_regular(const CoverChart& S, const Ideal& I) {
  for (const auto& g : I.gens())
    if (S.is_regular_element(g)) return g;
  for (const auto& g : I.canonical_gens())
    if (S.is_regular_element(g)) return g;
  std::mt19937_64 rng(0xfeedULL);
  const auto& gens = I.canonical_gens();
  if (gens.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 24; ++attempt) {
    MultiPoly f = S.zero();
    for (const auto& g : gens) f += random_scalar(S.field(), rng) * g;
    if (S.is_regular_element(f)) return S.reduce(f);
  }
  return std::nullopt;
}

/// gcd of all coordinates of all generators (k[t] base).
inline UniPoly content(const CoverChart& S, const std::vector<MultiPoly>& gens) {
  UniPoly g(S.field());
  for (const auto& f : gens)
    for (const auto& c : S.coords(f)) g = gcd(g, c.to_uni(0));
  return g;
}

inline MultiPoly divide_coords(const CoverChart& S, const MultiPoly& f, const UniPoly& u) {
  std::vector<MultiPoly> c = S.coords(f);
  for (auto& e : c) e = S.base()->from_uni(exact_div(e.to_uni(0), u), 0);
  return S.from_coords(c);
}

}  // namespace detail

class FractionalIdeal {
 public:
  FractionalIdeal(CoverPtr S, Ideal num, MultiPoly den) : S_(std::move(S)), num_(std::move(num)), den_(S_->reduce(den)) {
    if (!num_.ring()->same_as(*S_->ring())) throw RingMismatch("numerator does not live in the cover ring");
    if (!S_->is_regular_element(den_)) throw DegenerateError("denominator is a zero divisor");
    auto r = detail::find_regular(*S_, num_);
    if (!r) throw DegenerateError("fractional ideal contains no regular element");
    regular_ = *r;
    normalize();
  }
  FractionalIdeal(CoverPtr S, Ideal num) : FractionalIdeal(S, std::move(num), S->one()) {}

  static FractionalIdeal whole(const CoverPtr& S) { return FractionalIdeal(S, Ideal::unit(S->ring())); }
  static FractionalIdeal principal(const CoverPtr& S, const MultiPoly& f, std::optional<MultiPoly> den = std::nullopt) {
    return FractionalIdeal(S, Ideal::principal(S->ring(), f), den ? *den : S->one());
  }

  const CoverPtr& cover() const noexcept { return S_; }
  const Ideal& numerator() const noexcept { return num_; }
  const MultiPoly& denominator() const noexcept { return den_; }
  const MultiPoly& regular_element() const noexcept { return regular_; }
  bool is_integral() const { return den_.is_constant(); }

  std::string to_string() const {
    std::string s = num_.to_string();
    if (!den_.is_one()) s += "/(" + S_->format(den_) + ")";
    return s;
  }

  friend bool operator==(const FractionalIdeal& a, const FractionalIdeal& b) {
    return scale_ideal(a.num_, b.den_) == scale_ideal(b.num_, a.den_);
  }
  friend bool operator!=(const FractionalIdeal& a, const FractionalIdeal& b) { return !(a == b); }

 private:
  void normalize() {
    if (!S_->base_is_k_t()) return;
    const auto& base = S_->base();
    auto base_coords = [&](const MultiPoly& f) -> std::optional<UniPoly> {
      auto c = S_->coords(f);
      for (std::size_t i = 1; i < c.size(); ++i)
        if (!c[i].is_zero()) return std::nullopt;
      return c[0].to_uni(0);
    };
    std::optional<UniPoly> d = base_coords(den_);
    if (!d) {
      MultiPoly adj = S_->adjugate(den_);
      num_ = scale_ideal(num_, adj);
      d = S_->element_norm(den_).to_uni(0);
    }
    const auto& gens = num_.canonical_gens();
    UniPoly u = gcd(detail::content(*S_, gens), *d);
    if (u.degree() > 0) {
      std::vector<MultiPoly> g;
      for (const auto& f : gens) g.push_back(detail::divide_coords(*S_, f, u));
      num_ = Ideal(num_.ring(), g, num_.order());
      d = exact_div(*d, u);
    }
    FieldElem lc = d->leading_coeff().inverse();
    den_ = S_->embed(base->from_uni(lc * *d, 0));
    auto r = detail::find_regular(*S_, num_);
    if (!r) throw DegenerateError("fractional ideal contains no regular element");
    regular_ = *r;
  }

  CoverPtr S_;
  Ideal num_;
  MultiPoly den_;
  MultiPoly regular_;
};

inline FractionalIdeal frac_product(const FractionalIdeal& a, const FractionalIdeal& b) {
  return FractionalIdeal(a.cover(), ideal_product(a.numerator(), b.numerator()), a.denominator() * b.denominator());
}

namespace detail {
/// A regular element of I, taken in the base when possible.
inline MultiPoly regular_in_base(const CoverChart& S, const FractionalIdeal& J) {
  const MultiPoly& r = J.regular_element();
  if (S.base()->is_polynomial_ring()) {
    MultiPoly n = S.element_norm(r);
    if (S.base_is_k_t()) n = S.base()->from_uni(n.to_uni(0).monic(), 0);
    return S.embed(n);
  }
  return r;
}
}  // namespace detail

/// { f in the total quotient ring : f * b ⊆ a }.
inline FractionalIdeal frac_colon(const FractionalIdeal& a, const FractionalIdeal& b) {
  const CoverChart& S = *a.cover();
  MultiPoly c = detail::regular_in_base(S, b);
  Ideal inner = ideal_colon(scale_ideal(a.numerator(), c), b.numerator());
  return FractionalIdeal(a.cover(), scale_ideal(inner, b.denominator()), c * a.denominator());
}

/// (S : J).
inline FractionalIdeal frac_dual(const FractionalIdeal& J) { return frac_colon(FractionalIdeal::whole(J.cover()), J); }

inline bool is_invertible(const FractionalIdeal& J) { return frac_product(J, frac_dual(J)) == FractionalIdeal::whole(J.cover()); }

/// det of the R-lattice of J in the free basis, divided by Nm(den). Needs base k[t].
inline BaseFraction ideal_norm(const FractionalIdeal& J) {
  const CoverChart& S = *J.cover();
  if (!S.base_is_k_t()) throw UnsupportedError("ideal norm needs the base chart k[t]");
  const std::size_t n = S.degree();
  std::vector<std::vector<UniPoly>> rows;
  for (const auto& g : J.numerator().gens())
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<UniPoly> row;
      for (const auto& c : S.coords(g * S.basis_element(j))) row.push_back(c.to_uni(0));
      rows.push_back(std::move(row));
    }
  if (rows.empty()) throw DegenerateError("zero ideal has no norm");
  auto h = hermite_rows(Matrix<UniPoly>::from_rows(rows), S.field());
  if (h.H.rows() != n) throw DegenerateError("ideal lattice is not of full rank");
  UniPoly d = UniPoly::constant(S.field().one());
  for (std::size_t i = 0; i < n; ++i) d = d * h.H(i, i);
  return BaseFraction(d, S.element_norm(J.denominator()).to_uni(0));
}

/// R-basis of the lattice of an integral ideal I (rows of the Hermite form), as elements of S.
inline std::vector<MultiPoly> lattice_basis(const CoverChart& S, const Ideal& I) {
  if (!S.base_is_k_t()) throw UnsupportedError("lattice bases need the base chart k[t]");
  const std::size_t n = S.degree();
  std::vector<std::vector<UniPoly>> rows;
  for (const auto& g : I.gens())
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<UniPoly> row;
      for (const auto& c : S.coords(g * S.basis_element(j))) row.push_back(c.to_uni(0));
      rows.push_back(std::move(row));
    }
  std::vector<MultiPoly> out;
  if (rows.empty()) return out;
  auto h = hermite_rows(Matrix<UniPoly>::from_rows(rows), S.field());
  for (std::size_t i = 0; i < h.H.rows(); ++i) {
    std::vector<MultiPoly> c;
    for (std::size_t j = 0; j < n; ++j) c.push_back(S.base()->from_uni(h.H(i, j), 0));
    out.push_back(S.from_coords(c));
  }
  return out;
}

/// An element num/den of the total quotient ring.
struct Fraction {
  MultiPoly num, den;
};

inline std::string format_fraction(const CoverChart& S, const Fraction& f) {
  if (f.den.is_one()) return S.format(f.num);
  return "(" + S.format(f.num) + ")/(" + S.format(f.den) + ")";
}

/// Brings a fraction to lowest terms with monic base denominator (k[t] base);
/// rescales by a constant so the numerator's leading coefficient is 1.
inline Fraction normalize_fraction(const CoverChart& S, Fraction f) {
  f.num = S.reduce(f.num);
  f.den = S.reduce(f.den);
  if (S.base_is_k_t()) {
    auto c = S.coords(f.den);
    bool in_base = true;
    for (std::size_t i = 1; i < c.size(); ++i) in_base = in_base && c[i].is_zero();
    UniPoly d = c[0].to_uni(0);
    if (!in_base) {
      f.num = S.reduce(f.num * S.adjugate(f.den));
      d = S.element_norm(f.den).to_uni(0);
    }
    UniPoly u = gcd(detail::content(S, {f.num}), d);
    if (u.degree() > 0) {
      f.num = detail::divide_coords(S, f.num, u);
      d = exact_div(d, u);
    }
    f.den = S.embed(S.base()->from_uni(d, 0));
  }
  if (!f.num.is_zero()) {
    FieldElem lc = f.num.leading_coeff(MonomialOrder::grevlex()).inverse();
    f.num = lc * f.num;
    f.den = lc * f.den;
  }
  if (f.den.is_constant() && !f.den.is_zero()) {
    FieldElem inv = f.den.constant_term().inverse();
    f.num = inv * f.num;
    f.den = S.one();
  } else if (S.base_is_k_t()) {
    // keep the denominator monic
    FieldElem lc = S.coords(f.den)[0].to_uni(0).leading_coeff().inverse();
    f.num = lc * f.num;
    f.den = lc * f.den;
  }
  return f;
}

enum class IsoVerdict { Isomorphic, NotIsomorphic, Undecided };

inline std::string to_string(IsoVerdict v) {
  switch (v) {
    case IsoVerdict::Isomorphic: return "ISOMORPHIC";
    case IsoVerdict::NotIsomorphic: return "NOT_ISOMORPHIC";
    default: return "UNDECIDED";
  }
}

struct IsoResult {
  IsoVerdict verdict;
  std::optional<Fraction> witness;
  std::string reason;
};

/// Whether h * b == a for h = num/den.
inline bool verify_witness(const FractionalIdeal& a, const FractionalIdeal& b, const Fraction& h) {
  if (!a.cover()->is_regular_element(h.num)) return false;
  return scale_ideal(scale_ideal(b.numerator(), h.num), a.denominator()) == scale_ideal(a.numerator(), h.den * b.denominator());
}

/// Searches (a : b) for a generator h with h * b = a. NOT_ISOMORPHIC is only
/// returned on an invariant that separates isomorphism classes
/// (invertibility or the multiplier ring (J : J)).
inline IsoResult ideal_iso_test(const FractionalIdeal& a, const FractionalIdeal& b, std::uint64_t seed = 1, int trials = 24) {
  const CoverChart& S = *a.cover();
  if (a == b) return {IsoVerdict::Isomorphic, Fraction{S.one(), S.one()}, "equal ideals"};
  FractionalIdeal C = frac_colon(a, b);
  const MultiPoly& e = C.denominator();
  std::vector<MultiPoly> cands = C.numerator().canonical_gens();
  for (const auto& g : C.numerator().gens()) cands.push_back(g);
  if (S.base_is_k_t())
    for (const auto& g : lattice_basis(S, C.numerator())) cands.push_back(g);
  auto attempt = [&](const MultiPoly& g) -> std::optional<IsoResult> {
    if (S.reduce(g).is_zero()) return std::nullopt;
    Fraction h{g, e};
    if (!verify_witness(a, b, h)) return std::nullopt;
    Fraction w = normalize_fraction(S, h);
    if (!verify_witness(a, b, w)) w = h;
    return IsoResult{IsoVerdict::Isomorphic, w, "generator of the colon ideal"};
  };
  for (const auto& g : cands)
    if (auto r = attempt(g)) return *r;
  std::mt19937_64 rng(seed);
  const auto base_gens = C.numerator().canonical_gens();
  for (int t = 0; t < trials && !base_gens.empty(); ++t) {
    MultiPoly g = S.zero();
    for (const auto& x : base_gens) g += random_scalar(S.field(), rng) * x;
    if (auto r = attempt(g)) {
      r->reason = "random combination of colon generators";
      return *r;
    }
  }
  bool ia = is_invertible(a), ib = is_invertible(b);
  if (ia != ib) return {IsoVerdict::NotIsomorphic, std::nullopt, "exactly one of the ideals is invertible"};
  if (frac_colon(a, a) != frac_colon(b, b)) return {IsoVerdict::NotIsomorphic, std::nullopt, "multiplier rings differ"};
  return {IsoVerdict::Undecided, std::nullopt, "no witness among colon generators and random combinations"};
}

}  // namespace specchart
