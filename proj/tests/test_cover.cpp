#include <gtest/gtest.h>

#include <random>

#include "specchart/cover.hpp"

using namespace specchart;

namespace {

const Field F7 = Field::prime(7);
const Field F10007 = Field::prime(10007);

RingPtr k_t(const Field& F) { return QuotientRing::make(F, {"t"}); }

CoverPtr cover_of(const Field& F, const std::vector<std::string>& coeffs) {
  auto R = k_t(F);
  std::vector<MultiPoly> a;
  for (const auto& c : coeffs) a.push_back(parse_poly(c, {"t"}, F));
  return CoverChart::monic(R, "x", a);
}

CoverPtr sqrt_t(const Field& F = F7) { return cover_of(F, {"0", "-t"}); }

CoverPtr tacnode(const Field& F = F7) {
  auto B = QuotientRing::make(F, {"s", "t"}, {parse_poly("t^2 - s^2", {"s", "t"}, F)});
  std::map<std::pair<std::size_t, std::size_t>, MultiPoly> table;
  table[{0, 0}] = parse_poly("s", {"x", "s", "t"}, F);
  auto c = CoverChart::free_basis(B, {"x"}, table);
  c->add_alias("y", c->var(2));
  return c;
}

MultiPoly random_base(const Field& F, std::mt19937_64& rng, int maxdeg, std::size_t nvars) {
  MultiPoly f(F, nvars);
  int deg = static_cast<int>(rng() % (maxdeg + 1));
  for (int i = 0; i <= deg; ++i) f.add_term(Monomial(nvars, static_cast<std::uint32_t>(i)), random_scalar(F, rng));
  return f;
}

MultiPoly random_element(const CoverChart& S, std::mt19937_64& rng, int maxdeg) {
  std::vector<MultiPoly> c;
  for (std::size_t i = 0; i < S.degree(); ++i) c.push_back(random_base(S.field(), rng, maxdeg, 1));
  return S.from_coords(c);
}

CoverPtr random_cover(const Field& F, std::mt19937_64& rng, std::size_t n) {
  std::vector<MultiPoly> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(random_base(F, rng, 2, 1));
  return CoverChart::monic(k_t(F), "x", a);
}

}  // namespace

TEST(Cover, NormExamples) {
  auto S = sqrt_t();
  auto t = S->parse_base("t");
  EXPECT_TRUE(S->element_norm(S->one()).is_one());
  EXPECT_EQ(S->element_norm(S->x()), -t);
  auto c = S->parse("3");
  EXPECT_EQ(S->element_norm(c), S->parse_base("9"));
}

TEST(Cover, TraceExamples) {
  auto S = sqrt_t();
  EXPECT_EQ(S->element_trace(S->one()), S->parse_base("2"));
  EXPECT_TRUE(S->element_trace(S->x()).is_zero());
  EXPECT_EQ(S->element_trace(S->parse("t^2 + 1 + (t - 3)*x")), S->parse_base("2*(t^2 + 1)"));
}

TEST(Cover, Coordinates) {
  auto S = sqrt_t();
  auto c = S->coords(S->parse("x^3 + 2"));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], S->parse_base("2"));
  EXPECT_EQ(c[1], S->parse_base("t"));
  EXPECT_EQ(S->from_coords(c), S->parse("x^3 + 2"));
}

TEST(Cover, TacnodeFreeForm) {
  auto A = tacnode();
  EXPECT_EQ(A->degree(), 2u);
  EXPECT_EQ(A->element_norm(A->x()), -A->parse_base("s"));
  EXPECT_EQ(A->parse("y^2"), A->parse("x^4"));
  EXPECT_TRUE(A->is_regular_element(A->x()));
  EXPECT_FALSE(A->is_regular_element(A->parse("y - x^2")));
}

TEST(Cover, InconsistentTableRejected) {
  auto R = QuotientRing::make(F7, {"t"});
  std::map<std::pair<std::size_t, std::size_t>, MultiPoly> table;
  auto v = [&](const char* s) { return parse_poly(s, {"u", "v", "t"}, F7); };
  // u*u = u and v*v = v, u*v = 1 is not associative: u = u*(u*v)... forces collapse
  table[{0, 0}] = v("u");
  table[{0, 1}] = v("1");
  table[{1, 1}] = v("v");
  EXPECT_THROW(CoverChart::free_basis(R, {"u", "v"}, table), IncompatibleError);
  std::map<std::pair<std::size_t, std::size_t>, MultiPoly> partial;
  partial[{0, 0}] = v("t");
  EXPECT_THROW(CoverChart::free_basis(R, {"u", "v"}, partial), IncompatibleError);
}

TEST(Cover, ClashingNamesRejected) { EXPECT_THROW(CoverChart::monic(k_t(F7), "t", {k_t(F7)->zero()}), IncompatibleError); }

TEST(IdealNorm, Examples) {
  auto S = sqrt_t();
  auto whole = FractionalIdeal::whole(S);
  EXPECT_TRUE(ideal_norm(whole).is_unit());
  auto X = FractionalIdeal::principal(S, S->x());
  EXPECT_EQ(ideal_norm(X).to_string("t"), "(t)");
  auto g = FractionalIdeal::principal(S, S->parse("t^2 - 3"));
  EXPECT_EQ(ideal_norm(g).to_string("t"), "(t^4 + t^2 + 2)");  // (t^2 - 3)^2 over F_7
}

TEST(IdealNorm, UnsupportedBase) {
  auto A = tacnode();
  EXPECT_THROW(ideal_norm(FractionalIdeal::whole(A)), UnsupportedError);
}

TEST(FractionalIdeals, DualOfX) {
  auto S = sqrt_t();
  auto X = FractionalIdeal::principal(S, S->x());
  auto Xd = frac_dual(X);
  EXPECT_EQ(Xd, FractionalIdeal::principal(S, S->one(), S->x()));
  EXPECT_EQ(ideal_norm(Xd).to_string("t"), "(1)/(t)");
  EXPECT_TRUE(is_invertible(X));
  EXPECT_EQ(frac_product(X, Xd), FractionalIdeal::whole(S));
}

TEST(IsoTest, SameIdeal) {
  auto S = sqrt_t();
  auto J = FractionalIdeal(S, Ideal(S->ring(), {S->x() - S->parse("2"), S->parse("t - 4")}));
  auto r = ideal_iso_test(J, J);
  EXPECT_EQ(r.verdict, IsoVerdict::Isomorphic);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.witness->num.is_one());
  EXPECT_TRUE(r.witness->den.is_one());
}

TEST(IsoTest, XAgainstItsInverse) {
  auto S = sqrt_t();
  auto X = FractionalIdeal::principal(S, S->x());
  auto r = ideal_iso_test(X, frac_dual(X));
  ASSERT_EQ(r.verdict, IsoVerdict::Isomorphic);
  EXPECT_EQ(format_fraction(*S, *r.witness), "t");
}

// k[t][x]/(x^2 - t) is k[x], so (1) and (x) are isomorphic with witness x.
TEST(IsoTest, UnitAgainstXIsIsomorphic) {
  auto S = sqrt_t();
  auto r = ideal_iso_test(FractionalIdeal::principal(S, S->x()), FractionalIdeal::whole(S));
  ASSERT_EQ(r.verdict, IsoVerdict::Isomorphic);
  EXPECT_EQ(format_fraction(*S, *r.witness), "x");
  EXPECT_NE(ideal_norm(FractionalIdeal::whole(S)), ideal_norm(FractionalIdeal::principal(S, S->x())));
}

TEST(IsoTest, CuspMaximalIdealIsNotPrincipal) {
  auto S = cover_of(F7, {"0", "-t^3"});
  auto m = FractionalIdeal(S, Ideal(S->ring(), {S->x(), S->parse("t")}));
  auto r = ideal_iso_test(FractionalIdeal::whole(S), m);
  EXPECT_EQ(r.verdict, IsoVerdict::NotIsomorphic);
  EXPECT_FALSE(is_invertible(m));
}

TEST(IsoTest, EllipticPointIsUndecidedOrCorrect) {
  // x^2 = t^3 - t: smooth affine elliptic curve; (x, t) is not principal.
  auto S = cover_of(F7, {"0", "-t^3 + t"});
  auto m = FractionalIdeal(S, Ideal(S->ring(), {S->x(), S->parse("t")}));
  auto r = ideal_iso_test(FractionalIdeal::whole(S), m);
  EXPECT_NE(r.verdict, IsoVerdict::Isomorphic);
  EXPECT_TRUE(is_invertible(m));
}

TEST(NormProperties, Multiplicative) {
  std::mt19937_64 rng(42);
  for (std::size_t n : {2u, 3u, 4u}) {
    auto S = random_cover(F10007, rng, n);
    for (int i = 0; i < 15; ++i) {
      auto f = random_element(*S, rng, 2), g = random_element(*S, rng, 2);
      auto mu = random_base(F10007, rng, 2, 1);
      EXPECT_EQ(S->element_norm(S->reduce(f * g)), S->element_norm(f) * S->element_norm(g));
      EXPECT_EQ(S->element_norm(S->reduce(S->embed(mu) * f)), mu.pow(static_cast<std::uint32_t>(n)) * S->element_norm(f));
      // adjugate identity
      EXPECT_EQ(S->reduce(f * S->adjugate(f)), S->embed(S->element_norm(f)));
    }
  }
}

TEST(NormProperties, IdealNormOfPrincipalAndProducts) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {2u, 3u}) {
    auto S = random_cover(F10007, rng, n);
    for (int i = 0; i < 5; ++i) {
      auto f = random_element(*S, rng, 1);
      if (S->element_norm(f).is_zero()) continue;
      auto J = FractionalIdeal::principal(S, f);
      auto nf = S->element_norm(f).to_uni(0);
      EXPECT_EQ(ideal_norm(J), BaseFraction(nf, UniPoly::constant(F10007.one())));
      auto h = random_element(*S, rng, 1);
      auto K = FractionalIdeal(S, Ideal(S->ring(), {h, S->embed(random_base(F10007, rng, 2, 1)) + S->one()}));
      EXPECT_EQ(ideal_norm(frac_product(K, J)), ideal_norm(K) * ideal_norm(J));
      auto g = random_base(F10007, rng, 2, 1);
      if (g.is_zero()) continue;
      auto ext = FractionalIdeal::principal(S, S->embed(g));
      EXPECT_EQ(ideal_norm(ext).num, g.to_uni(0).pow(n).monic());
    }
  }
}
