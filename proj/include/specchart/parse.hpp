#pragma once

// Infix polynomial literals: `x^2 - t`, `3*s*t + 1/2`, `(x - 1)^3`, `2t`.
// Juxtaposition multiplies. Division is allowed by nonzero constants only.

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "multipoly.hpp"

namespace specchart {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return col_; }

 private:
  std::size_t line_, col_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(const std::string& text, const std::vector<std::string>& names, const Field& F, std::size_t line, std::size_t col0)
      : s_(text), names_(names), F_(F), line_(line), col0_(col0) {}

  MultiPoly parse() {
    skip();
    if (pos_ == s_.size()) fail("empty polynomial");
    MultiPoly r = expr();
    skip();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(line_, col0_ + pos_, m); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  std::size_t n() const { return names_.size(); }

  MultiPoly expr() {
    MultiPoly r = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        r += term();
      } else if (peek('-')) {
        ++pos_;
        r -= term();
      } else {
        return r;
      }
    }
  }

  bool starts_factor() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(';
  }

  MultiPoly term() {
    MultiPoly r = unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        r = r * unary();
      } else if (peek('/')) {
        ++pos_;
        std::size_t at = pos_;
        MultiPoly d = unary();
        if (!d.is_constant() || d.is_zero()) {
          pos_ = at;
          fail("division is only allowed by a nonzero constant");
        }
        r = d.constant_term().inverse() * r;
      } else if (starts_factor()) {
        r = r * power();
      } else {
        return r;
      }
    }
  }

  MultiPoly unary() {
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  MultiPoly power() {
    MultiPoly base = atom();
    if (peek('^')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      if (pos_ - start > 6) fail("exponent too large");
      base = base.pow(static_cast<std::uint32_t>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  MultiPoly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of polynomial");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly r = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class v(s_.substr(start, pos_ - start));
      return MultiPoly::constant(F_, n(), F_.from_fraction(v, 1));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < n(); ++i)
        if (names_[i] == id) return MultiPoly::variable(F_, n(), i);
      pos_ = start;
      fail("unknown variable '" + id + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& names_;
  Field F_;
  std::size_t line_, col0_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` as a polynomial in `names`. Error positions are reported as
/// (line, col0 + offset), so callers can pass the literal's location in a file.
inline MultiPoly parse_poly(const std::string& text, const std::vector<std::string>& names, const Field& F, std::size_t line = 1,
                            std::size_t col0 = 1) {
  return detail::PolyParser(text, names, F, line, col0).parse();
}

}  // namespace specchart
