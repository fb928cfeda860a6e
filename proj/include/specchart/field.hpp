#pragma once

// Exact scalars: prime fields F_p (p < 2^31) and the rationals.

#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace specchart {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FieldMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

class FieldElem;

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// Descriptor for the coefficient field. characteristic() == 0 means Q.
class Field {
 public:
  constexpr Field() = default;

  static Field prime(std::uint64_t p) {
    if (p >= (std::uint64_t{1} << 31)) throw std::invalid_argument("prime modulus must be < 2^31");
    if (!is_prime_u64(p)) throw std::invalid_argument("field modulus " + std::to_string(p) + " is not prime");
    Field f;
    f.p_ = p;
    return f;
  }
  static Field rationals() { return Field{}; }

  bool is_prime() const noexcept { return p_ != 0; }
  bool is_rational() const noexcept { return p_ == 0; }
  std::uint64_t characteristic() const noexcept { return p_; }

  FieldElem zero() const;
  FieldElem one() const;
  FieldElem from_int(std::int64_t n) const;
  FieldElem from_fraction(const mpz_class& num, const mpz_class& den) const;

  std::string name() const { return p_ ? "F_" + std::to_string(p_) : "Q"; }

  friend bool operator==(const Field& a, const Field& b) noexcept { return a.p_ == b.p_; }

 private:
  std::uint64_t p_ = 0;
};

class FieldElem {
 public:
  FieldElem() = default;  // zero of Q

  const Field& field() const noexcept { return field_; }

  bool is_zero() const {
    if (field_.is_prime()) return std::get<std::uint64_t>(val_) == 0;
    return sgn(std::get<mpq_class>(val_)) == 0;
  }
  bool is_one() const {
    if (field_.is_prime()) return std::get<std::uint64_t>(val_) == 1;
    return std::get<mpq_class>(val_) == 1;
  }

  FieldElem zero_like() const { return field_.zero(); }
  FieldElem one_like() const { return field_.one(); }

  /// Residue in [0, p) for prime fields.
  std::uint64_t residue() const { return std::get<std::uint64_t>(val_); }
  const mpq_class& rational() const { return std::get<mpq_class>(val_); }

  FieldElem operator-() const {
    FieldElem r = *this;
    if (field_.is_prime()) {
      auto v = std::get<std::uint64_t>(val_);
      r.val_ = v == 0 ? 0 : field_.characteristic() - v;
    } else {
      r.val_ = mpq_class(-std::get<mpq_class>(val_));
    }
    return r;
  }

  FieldElem& operator+=(const FieldElem& o) {
    check(o);
    if (field_.is_prime()) {
      auto s = std::get<std::uint64_t>(val_) + std::get<std::uint64_t>(o.val_);
      if (s >= field_.characteristic()) s -= field_.characteristic();
      val_ = s;
    } else {
      std::get<mpq_class>(val_) += std::get<mpq_class>(o.val_);
    }
    return *this;
  }
  FieldElem& operator-=(const FieldElem& o) {
    check(o);
    if (field_.is_prime()) {
      auto a = std::get<std::uint64_t>(val_), b = std::get<std::uint64_t>(o.val_);
      val_ = a >= b ? a - b : a + field_.characteristic() - b;
    } else {
      std::get<mpq_class>(val_) -= std::get<mpq_class>(o.val_);
    }
    return *this;
  }
  FieldElem& operator*=(const FieldElem& o) {
    check(o);
    if (field_.is_prime()) {
      val_ = (std::get<std::uint64_t>(val_) * std::get<std::uint64_t>(o.val_)) % field_.characteristic();
    } else {
      std::get<mpq_class>(val_) *= std::get<mpq_class>(o.val_);
    }
    return *this;
  }
  FieldElem& operator/=(const FieldElem& o) { return *this *= o.inverse(); }

  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a -= b; }
  friend FieldElem operator*(FieldElem a, const FieldElem& b) { return a *= b; }
  friend FieldElem operator/(FieldElem a, const FieldElem& b) { return a /= b; }

  FieldElem inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in " + field_.name());
    FieldElem r = *this;
    if (field_.is_prime()) {
      // extended Euclid on (v, p)
      std::int64_t a = static_cast<std::int64_t>(std::get<std::uint64_t>(val_));
      std::int64_t m = static_cast<std::int64_t>(field_.characteristic());
      std::int64_t x0 = 1, x1 = 0, b = m;
      while (b) {
        std::int64_t q = a / b;
        std::tie(a, b) = std::pair{b, a - q * b};
        std::tie(x0, x1) = std::pair{x1, x0 - q * x1};
      }
      x0 %= m;
      if (x0 < 0) x0 += m;
      r.val_ = static_cast<std::uint64_t>(x0);
    } else {
      r.val_ = mpq_class(1 / std::get<mpq_class>(val_));
    }
    return r;
  }

  FieldElem pow(std::uint64_t e) const {
    FieldElem base = *this, acc = field_.one();
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    if (!(a.field_ == b.field_)) return false;
    if (a.field_.is_prime()) return std::get<std::uint64_t>(a.val_) == std::get<std::uint64_t>(b.val_);
    return std::get<mpq_class>(a.val_) == std::get<mpq_class>(b.val_);
  }

  /// Total order used for canonical sorting only (not compatible with arithmetic).
  friend bool canonical_less(const FieldElem& a, const FieldElem& b) {
    if (a.field_.is_prime()) return std::get<std::uint64_t>(a.val_) < std::get<std::uint64_t>(b.val_);
    return std::get<mpq_class>(a.val_) < std::get<mpq_class>(b.val_);
  }

  /// Prime-field values print in the symmetric range (-p/2, p/2].
  std::string to_string() const {
    if (field_.is_prime()) {
      auto v = std::get<std::uint64_t>(val_);
      auto p = field_.characteristic();
      if (v > p / 2) return "-" + std::to_string(p - v);
      return std::to_string(v);
    }
    return std::get<mpq_class>(val_).get_str();
  }
  /// True when to_string() starts with '-'.
  bool prints_negative() const {
    if (field_.is_prime()) return std::get<std::uint64_t>(val_) > field_.characteristic() / 2;
    return sgn(std::get<mpq_class>(val_)) < 0;
  }

 private:
  friend class Field;
  void check(const FieldElem& o) const {
    if (!(field_ == o.field_)) throw FieldMismatch("arithmetic across different fields: " + field_.name() + " vs " + o.field_.name());
  }

  Field field_;
  std::variant<std::uint64_t, mpq_class> val_{mpq_class(0)};
};

inline FieldElem Field::zero() const { return from_int(0); }
inline FieldElem Field::one() const { return from_int(1); }

inline FieldElem Field::from_int(std::int64_t n) const {
  FieldElem e;
  e.field_ = *this;
  if (p_) {
    auto m = static_cast<std::int64_t>(p_);
    std::int64_t r = n % m;
    if (r < 0) r += m;
    e.val_ = static_cast<std::uint64_t>(r);
  } else {
    e.val_ = mpq_class(static_cast<long>(n));
  }
  return e;
}

inline FieldElem Field::from_fraction(const mpz_class& num, const mpz_class& den) const {
  if (den == 0) throw std::domain_error("zero denominator in literal");
  FieldElem e;
  e.field_ = *this;
  if (p_) {
    mpz_class pm(static_cast<unsigned long>(p_));
    mpz_class n = num % pm, d = den % pm;
    if (n < 0) n += pm;
    if (d < 0) d += pm;
    FieldElem a = from_int(static_cast<std::int64_t>(n.get_ui()));
    FieldElem b = from_int(static_cast<std::int64_t>(d.get_ui()));
    return a / b;
  }
  mpq_class q(num, den);
  q.canonicalize();
  e.val_ = q;
  return e;
}

}  // namespace specchart
