#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "specchart/divisors.hpp"

using namespace specchart;

namespace {

const Field F7 = Field::prime(7);

RingPtr k_t(const Field& F = F7) { return QuotientRing::make(F, {"t"}); }

CoverPtr cover_of(const std::vector<std::string>& coeffs, const Field& F = F7) {
  std::vector<MultiPoly> a;
  for (const auto& c : coeffs) a.push_back(parse_poly(c, {"t"}, F));
  return CoverChart::monic(k_t(F), "x", a);
}

CoverPtr tacnode() {
  auto B = QuotientRing::make(F7, {"s", "t"}, {parse_poly("t^2 - s^2", {"s", "t"}, F7)});
  std::map<std::pair<std::size_t, std::size_t>, MultiPoly> table;
  table[{0, 0}] = parse_poly("s", {"x", "s", "t"}, F7);
  auto c = CoverChart::free_basis(B, {"x"}, table);
  c->add_alias("y", c->var(2));
  return c;
}

Ideal cover_ideal(const CoverChart& S, std::initializer_list<const char*> g) {
  std::vector<MultiPoly> v;
  for (auto s : g) v.push_back(S.parse(s));
  return Ideal(S.ring(), v);
}

Ideal base_ideal(const CoverChart& S, std::initializer_list<const char*> g) {
  std::vector<MultiPoly> v;
  for (auto s : g) v.push_back(S.parse_base(s));
  return Ideal(S.base(), v);
}

MultiPoly random_t_poly(std::mt19937_64& rng, int mindeg, int maxdeg) {
  MultiPoly f(F7, 1);
  int deg = mindeg + static_cast<int>(rng() % (maxdeg - mindeg + 1));
  for (int i = 0; i < deg; ++i) f.add_term(Monomial{static_cast<std::uint32_t>(i)}, random_scalar(F7, rng));
  f.add_term(Monomial{static_cast<std::uint32_t>(deg)}, F7.one());
  return f;
}

/// Random effective divisor on a cover of k[t]: an ideal containing a nonzero base element.
GeneralizedDivisor random_effective(const CoverChart& S, std::mt19937_64& rng) {
  MultiPoly h = S.embed(random_t_poly(rng, 1, 2));
  MultiPoly g = S.zero();
  for (std::size_t i = 0; i < S.degree(); ++i) g += S.embed(random_t_poly(rng, 0, 1)) * S.basis_element(i);
  return GeneralizedDivisor(Ideal(S.ring(), {h, g}));
}

}  // namespace

TEST(Tacnode, PushforwardOfX2Y) {
  auto t0 = std::chrono::steady_clock::now();
  auto A = tacnode();
  GeneralizedDivisor D(cover_ideal(*A, {"x^2", "y"}));
  auto img = direct_image(*A, D);
  EXPECT_EQ(img.effective_part(), base_ideal(*A, {"s^2", "s*t", "t^2"}));
  EXPECT_EQ(img.to_string(), "(s^2, s*t, t^2)");
  EXPECT_EQ(chart_degree(D), 2);
  EXPECT_EQ(chart_degree(img), 3);
  auto t1 = std::chrono::steady_clock::now();
  EXPECT_LT(std::chrono::duration<double>(t1 - t0).count(), 1.0);
}

TEST(Tacnode, PushforwardOfX) {
  auto A = tacnode();
  GeneralizedDivisor D(cover_ideal(*A, {"x"}));
  auto img = direct_image(*A, D);
  EXPECT_EQ(img.to_string(), "(s)");
  EXPECT_EQ(chart_degree(D), 2);
  EXPECT_EQ(chart_degree(img), 2);
  EXPECT_TRUE(D.is_cartier());
  EXPECT_FALSE(GeneralizedDivisor(cover_ideal(*A, {"x^2", "y"})).is_cartier());
}

TEST(Tacnode, SumAndPullback) {
  auto A = tacnode();
  GeneralizedDivisor X(cover_ideal(*A, {"x"}));
  auto XX = divisor_sum(X, X);
  EXPECT_EQ(XX.effective_part(), cover_ideal(*A, {"x^2"}));
  EXPECT_TRUE(XX.is_effective());
  EXPECT_EQ(divisor_sum(X, GeneralizedDivisor::zero(A->ring())), X);
  auto s = inverse_image(*A, GeneralizedDivisor(base_ideal(*A, {"s"})));
  EXPECT_EQ(s.effective_part(), cover_ideal(*A, {"x^2"}));
  EXPECT_EQ(inverse_image(*A, GeneralizedDivisor::zero(A->base())), GeneralizedDivisor::zero(A->ring()));
}

TEST(DirectImage, PullbackOfPoint) {
  auto S = cover_of({"0", "-t"});
  auto D = inverse_image(*S, GeneralizedDivisor(base_ideal(*S, {"t - 1"})));
  EXPECT_EQ(direct_image(*S, D).effective_part(), base_ideal(*S, {"(t - 1)^2"}));
  auto Dt = inverse_image(*S, GeneralizedDivisor(base_ideal(*S, {"t"})));
  EXPECT_EQ(Dt.effective_part(), cover_ideal(*S, {"x^2"}));
}

TEST(DirectImage, MinorsAndSmithAgree) {
  std::mt19937_64 rng(101);
  for (auto coeffs : std::vector<std::vector<std::string>>{{"0", "-t"}, {"t", "0", "t^2 + 1"}, {"1", "t", "0", "-t"}}) {
    auto S = cover_of(coeffs);
    for (int i = 0; i < 6; ++i) {
      auto D = random_effective(*S, rng);
      auto a = direct_image(*S, D, FittingRoute::Minors), b = direct_image(*S, D, FittingRoute::Smith);
      EXPECT_EQ(a, b);
    }
  }
}

TEST(DirectImage, NegativePart) {
  auto S = cover_of({"0", "-t"});
  GeneralizedDivisor D(Ideal::unit(S->ring()), S->x());
  auto img = direct_image(*S, D);
  EXPECT_EQ(img.negative_part(), S->parse_base("t"));
  EXPECT_EQ(chart_degree(img), -1);
  EXPECT_EQ(chart_degree(D), -1);
}

TEST(Degrees, AtPoint) {
  auto R = k_t();
  auto one = [&](const char* s) { return Ideal(R, {parse_poly(s, {"t"}, F7)}); };
  GeneralizedDivisor D(one("t^2*(t - 1)"));
  EXPECT_EQ(degree_at_point(D, one("t")), 2);
  EXPECT_EQ(degree_at_point(D, one("t - 1")), 1);
  EXPECT_EQ(degree_at_point(D, one("t - 2")), 0);
  EXPECT_EQ(degree_at_point(D, one("t"), LocalRoute::Saturation), 2);
  EXPECT_THROW(degree_at_point(D, one("t^2")), NotMaximalError);
  EXPECT_EQ(chart_degree(GeneralizedDivisor::zero(R)), 0);
}

TEST(Degrees, NonArtinianRejected) {
  auto A = tacnode();
  EXPECT_THROW(GeneralizedDivisor(cover_ideal(*A, {"y - x^2"})), DegenerateError);
}

TEST(Preimage, Examples) {
  auto S = cover_of({"0", "-t"});
  auto r0 = find_preimage_divisor(*S, GeneralizedDivisor::zero(S->base()));
  EXPECT_TRUE(r0.divisor.effective_part().is_unit());
  auto r1 = find_preimage_divisor(*S, GeneralizedDivisor(base_ideal(*S, {"t - 1"})));
  EXPECT_EQ(r1.divisor.effective_part(), cover_ideal(*S, {"x - 1", "t - 1"}));
  auto r2 = find_preimage_divisor(*S, GeneralizedDivisor(base_ideal(*S, {"t^2"})));
  EXPECT_EQ(r2.divisor.effective_part(), cover_ideal(*S, {"x^2"}));
  // 3 is not a square mod 7: the only point over t = 3 has residue degree 2
  EXPECT_THROW(find_preimage_divisor(*S, GeneralizedDivisor(base_ideal(*S, {"t - 3"}))), std::runtime_error);
  auto r3 = find_preimage_divisor(*S, GeneralizedDivisor(base_ideal(*S, {"(t - 3)^2*(t^2 + 1)"})));
  EXPECT_EQ(direct_image(*S, r3.divisor).effective_part(), base_ideal(*S, {"(t - 3)^2*(t^2 + 1)"}));
}

TEST(DivisorProperties, PushPullIsMultiplication) {
  std::mt19937_64 rng(5);
  for (auto coeffs : std::vector<std::vector<std::string>>{{"0", "-t"}, {"t", "2", "t^2 + 1"}}) {
    auto S = cover_of(coeffs);
    for (int i = 0; i < 8; ++i) {
      auto g = random_t_poly(rng, 0, 3);
      auto h = random_t_poly(rng, 0, 2);
      GeneralizedDivisor D(Ideal(S->base(), {g}), h);
      auto lhs = direct_image(*S, inverse_image(*S, D));
      EXPECT_EQ(lhs, divisor_multiple(D, static_cast<unsigned>(S->degree())));
    }
  }
}

TEST(DivisorProperties, LinearityDegreeAndFiberSums) {
  std::mt19937_64 rng(6);
  auto S = cover_of({"t", "0", "t^2 - 2"});
  for (int i = 0; i < 8; ++i) {
    auto D = random_effective(*S, rng);
    auto f = S->reduce(S->embed(random_t_poly(rng, 0, 1)) + S->x() * S->embed(random_t_poly(rng, 0, 1)));
    if (!S->is_regular_element(f)) continue;
    auto E = GeneralizedDivisor::principal(S->ring(), f);
    EXPECT_EQ(direct_image(*S, divisor_sum(D, E)), divisor_sum(direct_image(*S, D), direct_image(*S, E)));
    EXPECT_EQ(direct_image(*S, E).effective_part(), Ideal(S->base(), {S->element_norm(f)}));
    EXPECT_EQ(chart_degree(direct_image(*S, D)), chart_degree(D));
    std::int64_t sum = 0;
    for (const auto& m : divisor_support(D)) {
      auto a = degree_at_point(D, m);
      EXPECT_EQ(a, degree_at_point(D, m, LocalRoute::Saturation));
      sum += a;
    }
    EXPECT_EQ(sum, chart_degree(D));
  }
}

TEST(DivisorProperties, FittingCommutesWithSpecialization) {
  std::mt19937_64 rng(8);
  auto S = cover_of({"0", "t", "1"});
  for (int i = 0; i < 8; ++i) {
    auto D = random_effective(*S, rng);
    UniPoly e = direct_image(*S, D).effective_part().canonical_gens()[0].to_uni(0);
    for (std::int64_t c = 0; c < 7; ++c) {
      // fiber of S/I over t = c is nonzero exactly when e(c) = 0
      auto spec = ideal_sum(D.effective_part(), Ideal(S->ring(), {S->embed(S->parse_base("t - " + std::to_string(c)))}));
      EXPECT_EQ(e.eval(F7.from_int(c)).is_zero(), !spec.is_unit());
      // the specialized presentation has full rank exactly when e(c) != 0
      auto M = quotient_presentation(*S, D.effective_part());
      auto Mc = M.map([&](const MultiPoly& x) { return x.to_uni(0).eval(F7.from_int(c)); });
      EXPECT_EQ(rank(Mc) == S->degree(), !e.eval(F7.from_int(c)).is_zero());
    }
  }
}
