#pragma once

// Dense univariate polynomials over a Field; the chart ring k[t].

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "field.hpp"

namespace specchart {

class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(Field f) : field_(f) {}
  UniPoly(Field f, std::vector<FieldElem> coeffs) : field_(f), c_(std::move(coeffs)) { trim(); }

  static UniPoly constant(const FieldElem& c) { return UniPoly(c.field(), {c}); }
  static UniPoly monomial(const FieldElem& c, std::size_t deg) {
    std::vector<FieldElem> v(deg + 1, c.zero_like());
    v[deg] = c;
    return UniPoly(c.field(), std::move(v));
  }
  static UniPoly variable(Field f) { return monomial(f.one(), 1); }
  /// Coefficients given as integers, low degree first.
  static UniPoly from_ints(Field f, std::initializer_list<std::int64_t> ints) {
    std::vector<FieldElem> v;
    for (auto i : ints) v.push_back(f.from_int(i));
    return UniPoly(f, std::move(v));
  }

  const Field& field() const noexcept { return field_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_constant() const noexcept { return c_.size() <= 1; }
  /// Nonzero constant.
  bool is_unit() const noexcept { return c_.size() == 1; }
  bool is_one() const { return c_.size() == 1 && c_[0].is_one(); }
  FieldElem coeff(std::size_t i) const { return i < c_.size() ? c_[i] : field_.zero(); }
  FieldElem leading_coeff() const { return c_.empty() ? field_.zero() : c_.back(); }
  const std::vector<FieldElem>& coeffs() const noexcept { return c_; }

  UniPoly zero_like() const { return UniPoly(field_); }
  UniPoly one_like() const { return constant(field_.one()); }

  UniPoly operator-() const {
    UniPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  UniPoly& operator+=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field_.zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field_.zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly(a.field_);
    std::vector<FieldElem> r(a.c_.size() + b.c_.size() - 1, a.field_.zero());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return UniPoly(a.field_, std::move(r));
  }
  UniPoly& operator*=(const UniPoly& o) { return *this = *this * o; }
  friend UniPoly operator*(const FieldElem& s, UniPoly a) {
    for (auto& x : a.c_) x *= s;
    a.trim();
    return a;
  }

  /// Euclidean division; divisor must be nonzero.
  std::pair<UniPoly, UniPoly> divrem(const UniPoly& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    if (degree() < d.degree()) return {UniPoly(field_), *this};
    std::vector<FieldElem> r = c_;
    std::vector<FieldElem> q(c_.size() - d.c_.size() + 1, field_.zero());
    FieldElem inv = d.leading_coeff().inverse();
    for (int i = degree() - d.degree(); i >= 0; --i) {
      FieldElem coef = r[i + d.degree()] * inv;
      q[i] = coef;
      if (coef.is_zero()) continue;
      for (std::size_t j = 0; j < d.c_.size(); ++j) r[i + j] -= coef * d.c_[j];
    }
    r.resize(d.c_.size() - 1, field_.zero());
    return {UniPoly(field_, std::move(q)), UniPoly(field_, std::move(r))};
  }
  friend UniPoly operator/(const UniPoly& a, const UniPoly& b) { return a.divrem(b).first; }
  friend UniPoly operator%(const UniPoly& a, const UniPoly& b) { return a.divrem(b).second; }

  UniPoly monic() const {
    if (is_zero()) return *this;
    return leading_coeff().inverse() * *this;
  }

  FieldElem eval(const FieldElem& x) const {
    FieldElem acc = field_.zero();
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  /// this(g(t)).
  UniPoly compose(const UniPoly& g) const {
    UniPoly acc(field_);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * g + constant(*it);
    return acc;
  }
  UniPoly derivative() const {
    if (c_.size() <= 1) return UniPoly(field_);
    std::vector<FieldElem> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(field_.from_int(static_cast<std::int64_t>(i)) * c_[i]);
    return UniPoly(field_, std::move(r));
  }
  UniPoly pow(std::uint64_t e) const {
    UniPoly base = *this, acc = one_like();
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }
  UniPoly powmod(std::uint64_t e, const UniPoly& m) const {
    UniPoly base = *this % m, acc = one_like() % m;
    while (e) {
      if (e & 1) acc = (acc * base) % m;
      base = (base * base) % m;
      e >>= 1;
    }
    return acc;
  }

  friend bool operator==(const UniPoly& a, const UniPoly& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }

  std::string to_string(const std::string& var = "t") const {
    if (c_.empty()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const FieldElem& c = c_[static_cast<std::size_t>(i)];
      if (c.is_zero()) continue;
      bool neg = c.prints_negative();
      std::string mag = neg ? (-c).to_string() : c.to_string();
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      if (i == 0) {
        out += mag;
      } else {
        if (mag != "1") out += mag + "*";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  Field field_;
  std::vector<FieldElem> c_;
};

/// Quotient of an exact division; throws when the remainder is nonzero.
inline UniPoly exact_div(const UniPoly& a, const UniPoly& b) {
  auto [q, r] = a.divrem(b);
  if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
  return q;
}

inline bool divides(const UniPoly& d, const UniPoly& a) {
  if (d.is_zero()) return a.is_zero();
  return (a % d).is_zero();
}

/// Monic gcd (zero when both inputs are zero).
inline UniPoly gcd(UniPoly a, UniPoly b) {
  while (!b.is_zero()) {
    UniPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Returns (g, s, u) with s*a + u*b = g, g monic gcd.
inline std::tuple<UniPoly, UniPoly, UniPoly> xgcd(const UniPoly& a, const UniPoly& b) {
  UniPoly r0 = a, r1 = b;
  UniPoly s0 = a.one_like(), s1 = a.zero_like();
  UniPoly u0 = a.zero_like(), u1 = a.one_like();
  while (!r1.is_zero()) {
    auto [q, r] = r0.divrem(r1);
    r0 = std::exchange(r1, r);
    s0 = std::exchange(s1, s0 - q * s1);
    u0 = std::exchange(u1, u0 - q * u1);
  }
  if (r0.is_zero()) return {r0, s0, u0};
  FieldElem inv = r0.leading_coeff().inverse();
  return {inv * r0, inv * s0, inv * u0};
}

inline UniPoly lcm(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return a.zero_like();
  return exact_div(a * b, gcd(a, b)).monic();
}

// ---------------------------------------------------------------------------
// Factorization over F_p.

namespace detail {

/// p-th root of a polynomial whose derivative vanishes (coefficients only at multiples of p).
inline UniPoly pth_root(const UniPoly& f) {
  auto p = f.field().characteristic();
  std::vector<FieldElem> r;
  for (std::size_t i = 0; i < f.coeffs().size(); i += p) r.push_back(f.coeffs()[i]);  // a^p = a in F_p
  return UniPoly(f.field(), std::move(r));
}

inline void squarefree_rec(const UniPoly& f, std::uint64_t mult, std::vector<std::pair<UniPoly, int>>& out) {
  if (f.degree() <= 0) return;
  auto p = f.field().characteristic();
  UniPoly df = f.derivative();
  if (df.is_zero()) {
    squarefree_rec(pth_root(f), mult * p, out);
    return;
  }
  UniPoly c = gcd(f, df);
  UniPoly w = exact_div(f, c);
  int i = 1;
  while (w.degree() > 0) {
    UniPoly y = gcd(w, c);
    UniPoly z = exact_div(w, y);
    if (z.degree() > 0) out.emplace_back(z.monic(), static_cast<int>(i * mult));
    ++i;
    w = y;
    c = exact_div(c, y);
  }
  if (c.degree() > 0) squarefree_rec(pth_root(c), mult * p, out);
}

/// Splits a squarefree f whose irreducible factors all have degree d.
inline void equal_degree_split(const UniPoly& f, int d, std::mt19937_64& rng, std::vector<UniPoly>& out) {
  if (f.degree() == d) {
    out.push_back(f.monic());
    return;
  }
  const Field& F = f.field();
  auto p = F.characteristic();
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  for (;;) {
    std::vector<FieldElem> rc;
    for (int i = 0; i < f.degree(); ++i) rc.push_back(F.from_int(static_cast<std::int64_t>(dist(rng))));
    UniPoly a(F, rc);
    if (a.degree() <= 0) continue;
    UniPoly g = gcd(a, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree_split(g, d, rng, out);
      equal_degree_split(exact_div(f, g), d, rng, out);
      return;
    }
    UniPoly b;
    if (p == 2) {
      // trace map a + a^2 + ... + a^(2^(d-1))
      UniPoly term = a % f, acc = term;
      for (int i = 1; i < d; ++i) {
        term = (term * term) % f;
        acc += term;
      }
      b = acc;
    } else {
      // a^((p^d-1)/2) = prod_{i<d} (a^(p^i))^((p-1)/2)
      UniPoly acc = f.one_like();
      UniPoly pw = a % f;
      for (int i = 0; i < d; ++i) {
        acc = (acc * pw.powmod((p - 1) / 2, f)) % f;
        pw = pw.powmod(p, f);
      }
      b = acc - f.one_like();
    }
    g = gcd(b, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree_split(g, d, rng, out);
      equal_degree_split(exact_div(f, g), d, rng, out);
      return;
    }
  }
}

}  // namespace detail

/// Squarefree decomposition: list of (squarefree monic factor, multiplicity).
inline std::vector<std::pair<UniPoly, int>> squarefree_decomposition(const UniPoly& f) {
  if (!f.field().is_prime()) throw std::invalid_argument("squarefree decomposition implemented over F_p only");
  std::vector<std::pair<UniPoly, int>> out;
  detail::squarefree_rec(f.monic(), 1, out);
  return out;
}

/// Complete factorization over F_p into monic irreducibles with multiplicities,
/// sorted by (degree, coefficients). Deterministic.
inline std::vector<std::pair<UniPoly, int>> factor(const UniPoly& f) {
  if (!f.field().is_prime()) throw std::invalid_argument("factorization implemented over F_p only");
  if (f.is_zero()) throw std::domain_error("cannot factor the zero polynomial");
  std::vector<std::pair<UniPoly, int>> result;
  std::mt19937_64 rng(0x5eed);
  auto p = f.field().characteristic();
  for (auto& [sq, mult] : squarefree_decomposition(f)) {
    // distinct-degree factorization
    UniPoly rest = sq;
    UniPoly xp = UniPoly::variable(f.field());
    UniPoly h = xp % rest;
    int d = 0;
    while (rest.degree() >= 2 * (d + 1)) {
      ++d;
      h = h.powmod(p, rest);
      UniPoly g = gcd(h - UniPoly::variable(f.field()), rest);
      if (g.degree() > 0) {
        std::vector<UniPoly> parts;
        detail::equal_degree_split(g, d, rng, parts);
        for (auto& q : parts) result.emplace_back(q, mult);
        rest = exact_div(rest, g);
        h = h % rest;
      }
    }
    if (rest.degree() > 0) result.emplace_back(rest.monic(), mult);
  }
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    const auto& ca = a.first.coeffs();
    const auto& cb = b.first.coeffs();
    for (std::size_t i = ca.size(); i-- > 0;) {
      if (!(ca[i] == cb[i])) return canonical_less(ca[i], cb[i]);
    }
    return false;
  });
  return result;
}

inline bool is_irreducible(const UniPoly& f) {
  if (f.degree() <= 0) return false;
  auto fs = factor(f);
  return fs.size() == 1 && fs[0].second == 1;
}

/// All monic irreducible polynomials of the given degree over F_p, in canonical order.
/// Only meant for small p^degree.
inline std::vector<UniPoly> monic_irreducibles(Field F, int degree) {
  std::vector<UniPoly> out;
  auto p = F.characteristic();
  std::uint64_t count = 1;
  for (int i = 0; i < degree; ++i) count *= p;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::vector<FieldElem> c;
    std::uint64_t v = idx;
    for (int i = 0; i < degree; ++i) {
      c.push_back(F.from_int(static_cast<std::int64_t>(v % p)));
      v /= p;
    }
    c.push_back(F.one());
    UniPoly q(F, std::move(c));
    if (degree == 1 || is_irreducible(q)) out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Element of the residue field F_p[t]/(q), q irreducible.
class ResidueElem {
 public:
  ResidueElem(std::shared_ptr<const UniPoly> modulus, UniPoly v) : mod_(std::move(modulus)), v_(std::move(v) % *mod_) {}

  const UniPoly& value() const noexcept { return v_; }
  const std::shared_ptr<const UniPoly>& modulus() const noexcept { return mod_; }

  bool is_zero() const noexcept { return v_.is_zero(); }
  ResidueElem zero_like() const { return {mod_, v_.zero_like()}; }
  ResidueElem one_like() const { return {mod_, v_.one_like()}; }

  ResidueElem operator-() const { return {mod_, -v_}; }
  friend ResidueElem operator+(const ResidueElem& a, const ResidueElem& b) { return {a.mod_, a.v_ + b.v_}; }
  friend ResidueElem operator-(const ResidueElem& a, const ResidueElem& b) { return {a.mod_, a.v_ - b.v_}; }
  friend ResidueElem operator*(const ResidueElem& a, const ResidueElem& b) { return {a.mod_, a.v_ * b.v_}; }
  ResidueElem& operator+=(const ResidueElem& o) { return *this = *this + o; }
  ResidueElem& operator-=(const ResidueElem& o) { return *this = *this - o; }
  ResidueElem& operator*=(const ResidueElem& o) { return *this = *this * o; }
  ResidueElem inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in residue field");
    auto [g, s, u] = xgcd(v_, *mod_);
    if (g.degree() != 0) throw std::domain_error("residue ring modulus is not irreducible");
    return {mod_, s};
  }
  friend ResidueElem operator/(const ResidueElem& a, const ResidueElem& b) { return a * b.inverse(); }
  friend bool operator==(const ResidueElem& a, const ResidueElem& b) { return a.v_ == b.v_; }

 private:
  std::shared_ptr<const UniPoly> mod_;
  UniPoly v_;
};

}  // namespace specchart
