#include <gtest/gtest.h>

#include <random>

#include "specchart/groebner.hpp"
#include "specchart/matrix.hpp"
#include "specchart/smith.hpp"
#include "specchart/unipoly.hpp"

using namespace specchart;

namespace {

const Field F7 = Field::prime(7);
const Field F101 = Field::prime(101);

UniPoly T(const Field& F) { return UniPoly::variable(F); }
UniPoly C(const Field& F, std::int64_t c) { return UniPoly::constant(F.from_int(c)); }

UniPoly random_poly(const Field& F, std::mt19937_64& rng, int maxdeg) {
  std::uniform_int_distribution<std::int64_t> d(0, 1000000);
  std::vector<FieldElem> c;
  int deg = static_cast<int>(rng() % (maxdeg + 1));
  for (int i = 0; i <= deg; ++i) c.push_back(F.from_int(d(rng)));
  return UniPoly(F, c);
}

Matrix<UniPoly> random_matrix(const Field& F, std::mt19937_64& rng, std::size_t n, int maxdeg) {
  Matrix<UniPoly> m(n, n, UniPoly(F));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_poly(F, rng, maxdeg);
  return m;
}

}  // namespace

TEST(Field, RejectsComposite) {
  EXPECT_THROW(Field::prime(15), std::invalid_argument);
  EXPECT_NO_THROW(Field::prime(10007));
}

TEST(Field, PrimeArithmetic) {
  auto a = F7.from_int(3), b = F7.from_int(5);
  EXPECT_EQ((a * b).to_string(), "1");
  EXPECT_EQ((a / b * b), a);
  EXPECT_EQ(F7.from_int(-1).to_string(), "-1");
  EXPECT_THROW(F7.zero().inverse(), std::domain_error);
}

TEST(Field, Rationals) {
  Field Q = Field::rationals();
  auto h = Q.from_fraction(1, 2);
  EXPECT_EQ((h + h), Q.one());
  EXPECT_EQ(h.to_string(), "1/2");
}

TEST(Det, Identity) {
  auto I = Matrix<UniPoly>::identity(2, UniPoly(F7), C(F7, 1));
  EXPECT_TRUE(det_bareiss(I).is_one());
  EXPECT_TRUE(det_cofactor(I).is_one());
}

TEST(Det, AntiDiagonal) {
  auto m = Matrix<UniPoly>::from_rows({{C(F7, 0), T(F7)}, {C(F7, 1), C(F7, 0)}});
  EXPECT_EQ(det_bareiss(m), -T(F7));
  EXPECT_EQ(det_cofactor(m), -T(F7));
}

TEST(Det, NormFormOfXSquaredMinusT) {
  // k[t][a,b] as MultiPoly in (t, a, b)
  auto v = [](std::size_t i) { return MultiPoly::variable(F7, 3, i); };
  auto t = v(0), a = v(1), b = v(2);
  auto m = Matrix<MultiPoly>::from_rows({{a, t * b}, {b, a}});
  EXPECT_EQ(det_cofactor(m), a * a - t * b * b);
}

TEST(Det, NonSquareThrows) {
  Matrix<UniPoly> m(2, 3, UniPoly(F7));
  EXPECT_THROW(det_bareiss(m), DimensionError);
  EXPECT_THROW(det_cofactor(m), DimensionError);
}

TEST(Det, MultiplicativeProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + rng() % 4;
    auto A = random_matrix(F101, rng, n, 3), B = random_matrix(F101, rng, n, 3);
    EXPECT_EQ(det_bareiss(A * B), det_bareiss(A) * det_bareiss(B));
    EXPECT_EQ(det_cofactor(A), det_bareiss(A));
  }
}

TEST(Smith, AlreadyDiagonal) {
  auto t = T(F7);
  auto m = Matrix<UniPoly>::from_rows({{t, C(F7, 0)}, {C(F7, 0), t * t}});
  auto s = smith_normal_form(m, F7);
  ASSERT_EQ(s.invariants.size(), 2u);
  EXPECT_EQ(s.invariants[0], t);
  EXPECT_EQ(s.invariants[1], t * t);
}

TEST(Smith, JordanBlock) {
  auto t = T(F7);
  auto m = Matrix<UniPoly>::from_rows({{t, C(F7, 1)}, {C(F7, 0), t}});
  auto s = smith_normal_form(m, F7);
  ASSERT_EQ(s.invariants.size(), 2u);
  EXPECT_TRUE(s.invariants[0].is_one());
  EXPECT_EQ(s.invariants[1], t * t);
  EXPECT_EQ(s.U * m * s.V, s.D);
}

TEST(Smith, ZeroMatrix) {
  Matrix<UniPoly> m(2, 2, UniPoly(F7));
  EXPECT_TRUE(smith_normal_form(m, F7).invariants.empty());
}

TEST(Smith, DivisibilityAndDeterminant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng() % 4;
    auto A = random_matrix(F7, rng, n, 2);
    auto s = smith_normal_form(A, F7);
    EXPECT_EQ(s.U * A * s.V, s.D);
    EXPECT_EQ(s.V * s.Vinv, Matrix<UniPoly>::identity(n, UniPoly(F7), C(F7, 1)));
    EXPECT_TRUE(det_bareiss(s.U).is_unit());
    EXPECT_TRUE(det_bareiss(s.V).is_unit());
    for (std::size_t i = 1; i < s.invariants.size(); ++i) EXPECT_TRUE(divides(s.invariants[i - 1], s.invariants[i]));
    UniPoly d = det_bareiss(A);
    if (!d.is_zero()) {
      UniPoly prod = C(F7, 1);
      for (auto& x : s.invariants) prod = prod * x;
      EXPECT_EQ(prod, d.monic());
    }
  }
}

TEST(Hermite, SpansSameLattice) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + rng() % 2;
    Matrix<UniPoly> G(n + 1, n, UniPoly(F7));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) G(i, j) = random_poly(F7, rng, 2);
    auto h = hermite_rows(G, F7);
    ASSERT_EQ(h.H.rows(), n);
    // determinant of the basis equals the gcd of maximal minors
    UniPoly g(F7);
    for (std::size_t skip = 0; skip <= n; ++skip) {
      std::vector<std::size_t> rows, cols;
      for (std::size_t i = 0; i <= n; ++i)
        if (i != skip) rows.push_back(i);
      for (std::size_t j = 0; j < n; ++j) cols.push_back(j);
      g = gcd(g, det_bareiss(G.submatrix(rows, cols)));
    }
    EXPECT_EQ(det_bareiss(h.H).monic(), g);
  }
}

TEST(CharPoly, Examples) {
  auto t = T(F7);
  Matrix<UniPoly> z(3, 3, UniPoly(F7));
  auto c = charpoly_berkowitz(z);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_TRUE(c[0].is_one());
  for (int i = 1; i <= 3; ++i) EXPECT_TRUE(c[i].is_zero());

  auto comp = Matrix<UniPoly>::from_rows({{C(F7, 0), t}, {C(F7, 1), C(F7, 0)}});
  c = charpoly_berkowitz(comp);
  EXPECT_TRUE(c[1].is_zero());
  EXPECT_EQ(c[2], -t);

  auto f = t + C(F7, 2), g = t * t;
  auto d = Matrix<UniPoly>::from_rows({{f, C(F7, 0)}, {C(F7, 0), g}});
  c = charpoly_berkowitz(d);
  EXPECT_EQ(c[1], -(f + g));
  EXPECT_EQ(c[2], f * g);
}

TEST(CharPoly, ConjugationInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng() % 4;
    auto M = random_matrix(F101, rng, n, 2);
    Matrix<FieldElem> g(n, n, F101.zero());
    do {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = F101.from_int(static_cast<std::int64_t>(rng() % 101));
    } while (rank(g) < n);
    // inverse via solving g X = I column by column
    Matrix<UniPoly> G(n, n, UniPoly(F101)), Gi(n, n, UniPoly(F101));
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<FieldElem> e(n, F101.zero());
      e[j] = F101.one();
      auto x = solve(g, e);
      ASSERT_TRUE(x);
      for (std::size_t i = 0; i < n; ++i) {
        G(i, j) = UniPoly::constant(g(i, j));
        Gi(i, j) = UniPoly::constant((*x)[i]);
      }
    }
    EXPECT_EQ(charpoly_berkowitz(G * M * Gi), charpoly_berkowitz(M));
    // det(xI - M) at x = 0 is (-1)^n det M
    auto c = charpoly_berkowitz(M);
    UniPoly dm = det_bareiss(M);
    EXPECT_EQ(c[n], (n % 2) ? -dm : dm);
  }
}

TEST(UniPoly, GcdWitness) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_poly(F7, rng, 5), b = random_poly(F7, rng, 5);
    auto common = random_poly(F7, rng, 2);
    a = a * common;
    b = b * common;
    auto [g, s, u] = xgcd(a, b);
    EXPECT_EQ(s * a + u * b, g);
    if (!g.is_zero()) {
      EXPECT_TRUE(divides(g, a));
      EXPECT_TRUE(divides(g, b));
      EXPECT_TRUE(g.leading_coeff().is_one());
    }
  }
}

TEST(UniPoly, FactorReassembles) {
  std::mt19937_64 rng(23);
  for (const Field& F : {Field::prime(2), Field::prime(3), F7, F101}) {
    for (int trial = 0; trial < 40; ++trial) {
      auto f = random_poly(F, rng, 8);
      if (f.degree() < 1) continue;
      f = f.monic();
      auto fs = factor(f);
      UniPoly prod = UniPoly::constant(F.one());
      for (auto& [q, e] : fs) {
        EXPECT_TRUE(is_irreducible(q));
        prod = prod * q.pow(static_cast<std::uint64_t>(e));
      }
      EXPECT_EQ(prod, f);
    }
  }
}

TEST(UniPoly, Irreducibles) {
  EXPECT_EQ(monic_irreducibles(F7, 1).size(), 7u);
  EXPECT_EQ(monic_irreducibles(F7, 2).size(), 21u);  // (49 - 7) / 2
}

TEST(Groebner, ZeroIdeal) {
  auto s = MultiPoly::variable(F7, 2, 0);
  EXPECT_TRUE(groebner_basis({s * s - s * s}, MonomialOrder::grevlex()).empty());
}

TEST(Groebner, TacnodeFitting) {
  auto s = MultiPoly::variable(F7, 2, 0), t = MultiPoly::variable(F7, 2, 1);
  auto gb = groebner_basis({t * t - s * s, s * s, s * t, t * t}, MonomialOrder::grevlex());
  ASSERT_EQ(gb.size(), 3u);
  EXPECT_EQ(gb[0], s * s);
  EXPECT_EQ(gb[1], s * t);
  EXPECT_EQ(gb[2], t * t);
}

TEST(Groebner, RedundantGenerator) {
  auto x = MultiPoly::variable(F7, 2, 0), y = MultiPoly::variable(F7, 2, 1);
  auto gb = groebner_basis({x * x, y, y * y - x.pow(4)}, MonomialOrder::grevlex());
  ASSERT_EQ(gb.size(), 2u);
  EXPECT_EQ(gb[0], x * x);
  EXPECT_EQ(gb[1], y);
}
