#pragma once

// Sparse multivariate polynomials and monomial orders.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "field.hpp"
#include "unipoly.hpp"

namespace specchart {

using Monomial = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), std::uint32_t{0}); }

inline bool monomial_divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}
inline Monomial monomial_lcm(const Monomial& a, const Monomial& b) {
  Monomial r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}
inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
/// a / b, assuming b | a.
inline Monomial monomial_div(const Monomial& a, const Monomial& b) {
  Monomial r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline bool monomials_coprime(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

/// Monomial order. Variable 0 is the largest variable. Block(k) compares the
/// first k variables by grevlex, then the remaining ones by grevlex; it is an
/// elimination order for the first block.
class MonomialOrder {
 public:
  enum class Kind { Lex, GrevLex, Block };

  static MonomialOrder lex() { return MonomialOrder(Kind::Lex, 0); }
  static MonomialOrder grevlex() { return MonomialOrder(Kind::GrevLex, 0); }
  static MonomialOrder block(std::size_t k) { return MonomialOrder(Kind::Block, k); }

  Kind kind() const noexcept { return kind_; }
  std::size_t block_size() const noexcept { return k_; }

  /// Negative, zero, positive as a < b, a == b, a > b.
  int compare(const Monomial& a, const Monomial& b) const {
    switch (kind_) {
      case Kind::Lex:
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
      case Kind::GrevLex:
        return grevlex_range(a, b, 0, a.size());
      case Kind::Block: {
        std::size_t k = std::min(k_, a.size());
        int c = grevlex_range(a, b, 0, k);
        if (c) return c;
        return grevlex_range(a, b, k, a.size());
      }
    }
    return 0;
  }
  bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

  std::string name() const {
    switch (kind_) {
      case Kind::Lex: return "lex";
      case Kind::GrevLex: return "grevlex";
      case Kind::Block: return "block(" + std::to_string(k_) + ")";
    }
    return "?";
  }

  friend bool operator==(const MonomialOrder& a, const MonomialOrder& b) { return a.kind_ == b.kind_ && a.k_ == b.k_; }

 private:
  MonomialOrder(Kind k, std::size_t b) : kind_(k), k_(b) {}

  static int grevlex_range(const Monomial& a, const Monomial& b, std::size_t lo, std::size_t hi) {
    std::uint32_t da = 0, db = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      da += a[i];
      db += b[i];
    }
    if (da != db) return da < db ? -1 : 1;
    for (std::size_t i = hi; i-- > lo;)
      if (a[i] != b[i]) return a[i] > b[i] ? -1 : 1;
    return 0;
  }

  Kind kind_;
  std::size_t k_;
};

class MultiPoly {
 public:
  using Terms = std::map<Monomial, FieldElem>;

  MultiPoly() = default;
  MultiPoly(Field f, std::size_t nvars) : field_(f), n_(nvars) {}

  static MultiPoly constant(Field f, std::size_t nvars, const FieldElem& c) {
    MultiPoly p(f, nvars);
    if (!c.is_zero()) p.t_.emplace(Monomial(nvars, 0), c);
    return p;
  }
  static MultiPoly constant(Field f, std::size_t nvars, std::int64_t c) { return constant(f, nvars, f.from_int(c)); }
  static MultiPoly variable(Field f, std::size_t nvars, std::size_t i) {
    Monomial m(nvars, 0);
    m.at(i) = 1;
    return term(f, m, f.one());
  }
  static MultiPoly term(Field f, const Monomial& m, const FieldElem& c) {
    MultiPoly p(f, m.size());
    if (!c.is_zero()) p.t_.emplace(m, c);
    return p;
  }
  /// Univariate polynomial placed in variable `var`.
  static MultiPoly from_uni(const UniPoly& u, std::size_t nvars, std::size_t var) {
    MultiPoly p(u.field(), nvars);
    for (std::size_t i = 0; i < u.coeffs().size(); ++i) {
      if (u.coeffs()[i].is_zero()) continue;
      Monomial m(nvars, 0);
      m.at(var) = static_cast<std::uint32_t>(i);
      p.t_.emplace(std::move(m), u.coeffs()[i]);
    }
    return p;
  }

  const Field& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return n_; }
  const Terms& terms() const noexcept { return t_; }
  std::size_t size() const noexcept { return t_.size(); }
  bool is_zero() const noexcept { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && specchart::total_degree(t_.begin()->first) == 0); }
  bool is_one() const { return is_constant() && !t_.empty() && t_.begin()->second.is_one(); }
  FieldElem constant_term() const {
    auto it = t_.find(Monomial(n_, 0));
    return it == t_.end() ? field_.zero() : it->second;
  }
  FieldElem coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? field_.zero() : it->second;
  }

  MultiPoly zero_like() const { return MultiPoly(field_, n_); }
  MultiPoly one_like() const { return constant(field_, n_, 1); }

  void add_term(const Monomial& m, const FieldElem& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = t_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
  }
  MultiPoly& operator+=(const MultiPoly& o) {
    check(o);
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check(o);
    for (const auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check(b);
    MultiPoly r(a.field_, a.n_);
    for (const auto& [ma, ca] : a.t_)
      for (const auto& [mb, cb] : b.t_) r.add_term(monomial_mul(ma, mb), ca * cb);
    return r;
  }
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
  friend MultiPoly operator*(const FieldElem& s, MultiPoly a) {
    if (s.is_zero()) return a.zero_like();
    for (auto& [m, c] : a.t_) c *= s;
    return a;
  }
  MultiPoly mul_term(const Monomial& m, const FieldElem& c) const {
    MultiPoly r(field_, n_);
    if (c.is_zero()) return r;
    for (const auto& [mm, cc] : t_) r.t_.emplace(monomial_mul(mm, m), cc * c);
    return r;
  }
  MultiPoly pow(std::uint32_t e) const {
    MultiPoly base = *this, acc = one_like();
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (a.n_ != b.n_ || a.t_.size() != b.t_.size()) return false;
    auto ia = a.t_.begin();
    for (auto ib = b.t_.begin(); ib != b.t_.end(); ++ia, ++ib)
      if (ia->first != ib->first || !(ia->second == ib->second)) return false;
    return true;
  }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, specchart::total_degree(m));
    return d;
  }
  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, m[var]);
    return d;
  }
  /// True when only variables in [lo, hi) occur.
  bool uses_only(std::size_t lo, std::size_t hi) const {
    for (const auto& [m, c] : t_)
      for (std::size_t i = 0; i < n_; ++i)
        if (m[i] && (i < lo || i >= hi)) return false;
    return true;
  }

  /// Leading monomial / coefficient under `ord`; polynomial must be nonzero.
  const Monomial& leading_monomial(const MonomialOrder& ord) const { return lead(ord)->first; }
  const FieldElem& leading_coeff(const MonomialOrder& ord) const { return lead(ord)->second; }

  MultiPoly monic(const MonomialOrder& ord) const {
    if (is_zero()) return *this;
    return leading_coeff(ord).inverse() * *this;
  }

  /// Re-embeds into `new_nvars` variables: old variable i becomes new variable map[i].
  MultiPoly remap(std::size_t new_nvars, const std::vector<std::size_t>& map) const {
    MultiPoly r(field_, new_nvars);
    for (const auto& [m, c] : t_) {
      Monomial nm(new_nvars, 0);
      for (std::size_t i = 0; i < n_; ++i)
        if (m[i]) nm.at(map.at(i)) += m[i];
      r.add_term(nm, c);
    }
    return r;
  }
  /// Substitutes variable i by images[i] (all of arity images[0].nvars()).
  MultiPoly substitute(const std::vector<MultiPoly>& images) const {
    if (images.size() != n_) throw DimensionError("substitute: wrong number of images");
    std::size_t target = images.empty() ? 0 : images[0].nvars();
    MultiPoly r(field_, target);
    for (const auto& [m, c] : t_) {
      MultiPoly term = constant(field_, target, c);
      for (std::size_t i = 0; i < n_; ++i)
        if (m[i]) term *= images[i].pow(m[i]);
      r += term;
    }
    return r;
  }
  /// Polynomial in a single variable `var` (others must be absent).
  UniPoly to_uni(std::size_t var) const {
    std::vector<FieldElem> c;
    for (const auto& [m, cc] : t_) {
      for (std::size_t i = 0; i < n_; ++i)
        if (i != var && m[i]) throw std::invalid_argument("to_uni: polynomial is not univariate");
      if (c.size() <= m[var]) c.resize(m[var] + 1, field_.zero());
      c[m[var]] = cc;
    }
    return UniPoly(field_, std::move(c));
  }

  /// Terms listed in decreasing `ord`.
  std::vector<std::pair<Monomial, FieldElem>> sorted_terms(const MonomialOrder& ord) const {
    std::vector<std::pair<Monomial, FieldElem>> v(t_.begin(), t_.end());
    std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) { return ord.compare(a.first, b.first) > 0; });
    return v;
  }

  std::string to_string(const std::vector<std::string>& names, const MonomialOrder& ord = MonomialOrder::grevlex()) const {
    if (t_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : sorted_terms(ord)) {
      bool neg = c.prints_negative();
      std::string mag = neg ? (-c).to_string() : c.to_string();
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      std::string mono;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!m[i]) continue;
        if (!mono.empty()) mono += "*";
        mono += i < names.size() ? names[i] : "v" + std::to_string(i);
        if (m[i] > 1) mono += "^" + std::to_string(m[i]);
      }
      if (mono.empty()) {
        out += mag;
      } else {
        if (mag != "1") out += mag + "*";
        out += mono;
      }
    }
    return out;
  }

 private:
  void check(const MultiPoly& o) const {
    if (n_ != o.n_) throw DimensionError("polynomial arity mismatch");
    if (!(field_ == o.field_)) throw FieldMismatch("polynomial field mismatch");
  }
  Terms::const_iterator lead(const MonomialOrder& ord) const {
    if (t_.empty()) throw std::domain_error("leading term of zero polynomial");
    auto best = t_.begin();
    for (auto it = std::next(t_.begin()); it != t_.end(); ++it)
      if (ord.compare(it->first, best->first) > 0) best = it;
    return best;
  }

  Field field_;
  std::size_t n_ = 0;
  Terms t_;
};

/// Multivariate division by a single polynomial; throws unless exact.
inline MultiPoly exact_div(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  auto ord = MonomialOrder::lex();
  MultiPoly q = a.zero_like(), r = a;
  const Monomial& lb = b.leading_monomial(ord);
  FieldElem inv = b.leading_coeff(ord).inverse();
  while (!r.is_zero()) {
    const Monomial lr = r.leading_monomial(ord);
    if (!monomial_divides(lb, lr)) throw std::domain_error("inexact multivariate division");
    Monomial m = monomial_div(lr, lb);
    FieldElem c = r.leading_coeff(ord) * inv;
    q.add_term(m, c);
    r -= b.mul_term(m, c);
  }
  return q;
}

}  // namespace specchart
