// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "specchart/divisors.hpp"
#include "specchart/spectral.hpp"

using namespace specchart;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Tally {
  int checks = 0, failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) first = what;
  }
};

const Field F7 = Field::prime(7);
const Field F10007 = Field::prime(10007);

RingPtr k_t(const Field& F) { return QuotientRing::make(F, {"t"}); }

MultiPoly random_base(const Field& F, std::mt19937_64& rng, int maxdeg) {
  MultiPoly f(F, 1);
  int deg = static_cast<int>(rng() % (maxdeg + 1));
  for (int i = 0; i <= deg; ++i) f.add_term(Monomial{static_cast<std::uint32_t>(i)}, random_scalar(F, rng));
  return f;
}

MultiPoly random_monic(const Field& F, std::mt19937_64& rng, int mindeg, int maxdeg) {
  MultiPoly f(F, 1);
  int deg = mindeg + static_cast<int>(rng() % (maxdeg - mindeg + 1));
  for (int i = 0; i < deg; ++i) f.add_term(Monomial{static_cast<std::uint32_t>(i)}, random_scalar(F, rng));
  f.add_term(Monomial{static_cast<std::uint32_t>(deg)}, F.one());
  return f;
}

MultiPoly random_element(const CoverChart& S, std::mt19937_64& rng, int maxdeg) {
  std::vector<MultiPoly> c;
  for (std::size_t i = 0; i < S.degree(); ++i) c.push_back(random_base(S.field(), rng, maxdeg));
  return S.from_coords(c);
}

std::vector<MultiPoly> random_coeffs(const Field& F, std::mt19937_64& rng, std::size_t n, int maxdeg) {
  std::vector<MultiPoly> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(random_base(F, rng, maxdeg));
  return a;
}

std::vector<UniPoly> uni(const std::vector<MultiPoly>& a) {
  std::vector<UniPoly> out;
  for (const auto& c : a) out.push_back(c.to_uni(0));
  return out;
}

Matrix<MultiPoly> random_matrix(const RingPtr& R, std::mt19937_64& rng, std::size_t n, int maxdeg) {
  Matrix<MultiPoly> m(n, n, R->zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_base(R->field(), rng, maxdeg);
  return m;
}

/// Norm of u + v x in k[t][x]/(x^2 + a1 x + a2), by the closed formula.
MultiPoly quadratic_norm(const MultiPoly& u, const MultiPoly& v, const MultiPoly& a1, const MultiPoly& a2) {
  return u * u - a1 * u * v + a2 * v * v;
}

bool report(int n, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name << " (" << detail << ")" << std::endl;
  return ok;
}

std::string tally_detail(const Tally& t, double secs) {
  std::ostringstream o;
  o << t.checks << " checks, " << t.failures << " failed, " << secs << " s";
  if (t.failures) o << "; first: " << t.first;
  return o.str();
}

CoverPtr tacnode() {
  auto B = QuotientRing::make(F7, {"s", "t"}, {parse_poly("t^2 - s^2", {"s", "t"}, F7)});
  std::map<std::pair<std::size_t, std::size_t>, MultiPoly> table;
  table[{0, 0}] = parse_poly("s", {"x", "s", "t"}, F7);
  auto c = CoverChart::free_basis(B, {"x"}, table);
  c->add_alias("y", c->var(2));
  return c;
}

// 1 ------------------------------------------------------------------------
bool tacnode_pushforwards() {
  auto t0 = Clock::now();
  Tally t;
  auto S = tacnode();
  auto ideal = [&](std::initializer_list<const char*> g) {
    std::vector<MultiPoly> v;
    for (auto s : g) v.push_back(S->parse(s));
    return Ideal(S->ring(), v);
  };
  GeneralizedDivisor X2Y(ideal({"x^2", "y"})), X(ideal({"x"}));
  auto a = direct_image(*S, X2Y), b = direct_image(*S, X);
  t.expect(a.effective_part().to_string() == "(s^2, s*t, t^2)", "pi_*(x^2, y) = " + a.effective_part().to_string());
  t.expect(chart_degree(X2Y) == 2 && chart_degree(a) == 3, "degrees of (x^2, y) and its image");
  t.expect(b.effective_part().to_string() == "(s)", "pi_*(x) = " + b.effective_part().to_string());
  t.expect(chart_degree(X) == 2 && chart_degree(b) == 2, "degrees of (x) and its image");
  for (auto route : {FittingRoute::Minors, FittingRoute::Smith}) {
    try {
      t.expect(direct_image(*S, X2Y, route) == a, "route disagreement");
    } catch (const UnsupportedError&) {
      // the Smith route needs a principal ideal domain base
    }
  }
  double secs = seconds_since(t0);
  t.expect(secs < 1.0, "took longer than 1 s");
  return report(1, "tacnode pushforwards", t.failures == 0, tally_detail(t, secs));
}

// 2 ------------------------------------------------------------------------
bool norm_identities() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(2024);
  auto R = k_t(F10007);
  for (std::size_t n : {2u, 3u, 4u}) {
    auto S = CoverChart::monic(R, "x", random_coeffs(F10007, rng, n, 2));
    for (int i = 0; i < 100; ++i) {
      auto f = random_element(*S, rng, 2), g = random_element(*S, rng, 2);
      auto mu = random_base(F10007, rng, 2);
      t.expect(S->element_norm(S->reduce(f * g)) == S->element_norm(f) * S->element_norm(g), "Nm(fg)");
      t.expect(S->element_norm(S->reduce(S->embed(mu) * f)) == mu.pow(static_cast<std::uint32_t>(n)) * S->element_norm(f), "Nm(mu f)");
    }
    int pairs = 0;
    while (pairs < 50) {
      auto f = random_element(*S, rng, 1);
      if (S->element_norm(f).is_zero()) continue;
      auto J1 = FractionalIdeal::principal(S, f);
      auto J2 = FractionalIdeal(S, Ideal(S->ring(), {random_element(*S, rng, 1), S->embed(random_monic(F10007, rng, 1, 2))}));
      t.expect(ideal_norm(frac_product(J1, J2)) == ideal_norm(J1) * ideal_norm(J2), "Nm(J1 J2), n = " + std::to_string(n));
      ++pairs;
    }
    int pulls = 0;
    while (pulls < 50) {
      auto g = random_base(F10007, rng, 3);
      if (g.is_zero()) continue;
      auto N = ideal_norm(FractionalIdeal::principal(S, S->embed(g)));
      t.expect(N.num == g.to_uni(0).pow(static_cast<std::uint32_t>(n)).monic() && N.den.degree() == 0, "Nm(pi^* g)");
      ++pulls;
    }
  }
  double secs = seconds_since(t0);
  return report(2, "norm identities over F_10007", t.failures == 0, tally_detail(t, secs));
}

// 3 ------------------------------------------------------------------------
GeneralizedDivisor random_effective(const CoverChart& S, std::mt19937_64& rng) {
  MultiPoly h = S.embed(random_monic(F7, rng, 1, 2));
  MultiPoly g = S.zero();
  for (std::size_t i = 0; i < S.degree(); ++i) g += S.embed(random_monic(F7, rng, 0, 1)) * S.basis_element(i);
  return GeneralizedDivisor(Ideal(S.ring(), {h, g}));
}

bool divisor_calculus() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(33);
  auto R = k_t(F7);
  std::vector<CoverPtr> covers{CoverChart::monic(R, "x", {R->zero(), parse_poly("-t", {"t"}, F7)}),
                               CoverChart::monic(R, "x", {parse_poly("t", {"t"}, F7), R->zero(), parse_poly("t^2 - 2", {"t"}, F7)})};
  for (int i = 0; i < 50; ++i) {
    const auto& S = covers[i % 2];
    GeneralizedDivisor D(Ideal(R, {random_monic(F7, rng, 0, 3)}), random_monic(F7, rng, 0, 2));
    t.expect(direct_image(*S, inverse_image(*S, D)) == divisor_multiple(D, static_cast<unsigned>(S->degree())), "pi_* pi^* D = n D");
  }
  int lin = 0;
  while (lin < 50) {
    const auto& S = covers[lin % 2];
    auto D = random_effective(*S, rng);
    auto f = S->reduce(S->embed(random_base(F7, rng, 1)) + S->x() * S->embed(random_base(F7, rng, 1)));
    if (!S->is_regular_element(f)) continue;
    auto E = GeneralizedDivisor::principal(S->ring(), f);
    t.expect(direct_image(*S, divisor_sum(D, E)) == divisor_sum(direct_image(*S, D), direct_image(*S, E)), "pi_*(D + E)");
    ++lin;
  }
  for (int i = 0; i < 50; ++i) {
    const auto& S = covers[i % 2];
    auto D = random_effective(*S, rng);
    std::int64_t deg = chart_degree(D);
    t.expect(chart_degree(direct_image(*S, D)) == deg, "deg pi_* D = deg D");
    std::int64_t sum = 0;
    for (const auto& m : divisor_support(D)) sum += degree_at_point(D, m);
    t.expect(sum == deg, "sum of local degrees");
  }
  double secs = seconds_since(t0);
  return report(3, "divisor calculus", t.failures == 0, tally_detail(t, secs));
}

// 4 ------------------------------------------------------------------------
bool bnr_sequences() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(44);
  auto R = k_t(F7);
  std::size_t min_points = 1000;
  for (std::size_t r : {2u, 3u, 4u})
    for (int it = 0; it < 10; ++it) {
      std::vector<MultiPoly> a;
      do a = random_coeffs(F7, rng, r, 2);
      while (detail::discriminant(uni(a), F7).is_zero());
      auto S = CoverChart::monic(R, "x", a);
      auto beta = F7.from_int(static_cast<std::int64_t>(rng() % 7));
      MultiPoly tb = S->embed(R->from_uni(UniPoly::variable(F7) - UniPoly::constant(beta), 0));
      auto J = FractionalIdeal(S, Ideal(S->ring(), {tb, random_element(*S, rng, 2)}));
      for (const auto& M : {SpectralModule::fractional(FractionalIdeal::whole(S)), SpectralModule::fractional(J)}) {
        auto rep = verify_bnr_sequence(M, static_cast<std::uint64_t>(r * 100 + it));
        std::string tag = "r = " + std::to_string(r) + " case " + std::to_string(it);
        t.expect(rep.psi_q_zero && rep.ev_psi_zero, "symbolic identities, " + tag);
        t.expect(rep.status == BnrStatus::Pass, "status " + to_string(rep.status) + ", " + tag);
        t.expect(rep.points.size() >= 20, "fewer than 20 points, " + tag);
        min_points = std::min(min_points, rep.points.size());
      }
    }
  double secs = seconds_since(t0);
  t.expect(secs < 60.0, "took longer than 60 s");
  return report(4, "spectral exact sequence", t.failures == 0, tally_detail(t, secs) + ", min points " + std::to_string(min_points));
}

// 5 ------------------------------------------------------------------------
bool round_trip() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(55);
  auto R = k_t(F7);
  int total = 0, undecided = 0;
  while (total < 25) {
    std::size_t r = 2 + static_cast<std::size_t>(total % 3);
    HiggsChart h(R, random_matrix(R, rng, r, 2));
    auto a = char_coeffs(h);
    if (detail::discriminant(uni(a), F7).is_zero()) continue;
    ++total;
    auto S = CoverChart::monic(R, "x", a);
    auto back = module_to_higgs(higgs_to_module(S, h));
    auto b = char_coeffs(back);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i] == b[i];
    t.expect(same, "characteristic coefficients changed");
    auto c = find_conjugator(h.uni(), back.uni(), static_cast<std::uint64_t>(total));
    if (!c.found) {
      ++undecided;
      continue;
    }
    t.expect(c.g * h.uni() == back.uni() * c.g, "g Phi != Phi' g");
    t.expect(det_bareiss(c.g).is_unit(), "det g not a unit");
  }
  double rate = static_cast<double>(undecided) / total;
  t.expect(rate < 0.2, "undecided rate too high");
  double secs = seconds_since(t0);
  std::ostringstream o;
  o << "undecided " << undecided << "/" << total << " = " << rate * 100 << "%; " << tally_detail(t, secs);
  return report(5, "Higgs round trip", t.failures == 0, o.str());
}

// 6 ------------------------------------------------------------------------
bool group_checks() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(66);
  auto R = k_t(F7);
  auto tpoly = [&](const char* s) { return parse_poly(s, {"t"}, F7); };

  // norm fiber: trivial, principal with nonunit norm, balanced (f^2)/Nm(f)
  for (int i = 0; i < 10; ++i) {
    auto a1 = random_base(F7, rng, 1), a2 = random_monic(F7, rng, 1, 2);
    auto S = CoverChart::monic(R, "x", {a1, a2});
    t.expect(norm_fiber_check(SpectralModule::fractional(FractionalIdeal::whole(S))).verdict == FiberVerdict::InFiber, "trivial module");
    auto u = random_base(F7, rng, 1), v = random_monic(F7, rng, 0, 1);
    auto f = S->reduce(S->embed(u) + S->embed(v) * S->x());
    auto N = quadratic_norm(u, v, a1, a2);
    if (N.is_zero()) continue;
    auto principal = norm_fiber_check(SpectralModule::fractional(FractionalIdeal::principal(S, f)));
    t.expect(principal.verdict == (N.is_constant() ? FiberVerdict::InFiber : FiberVerdict::NotInFiber), "principal (f)");
    auto balanced = FractionalIdeal(S, Ideal::principal(S->ring(), S->reduce(f * f)), S->embed(N));
    t.expect(norm_fiber_check(SpectralModule::fractional(balanced)).verdict == FiberVerdict::InFiber, "(f^2)/Nm(f)");
  }

  // parity against P(-x) = P(x) computed by substitution
  for (int i = 0; i < 100; ++i) {
    std::size_t n = 2 * (1 + rng() % 3);
    bool kill_odd = rng() % 2;
    auto a = random_coeffs(F7, rng, n, 2);
    if (kill_odd)
      for (std::size_t k = 0; k < n; k += 2) a[k] = R->zero();  // a_1, a_3, ...
    auto S = CoverChart::monic(R, "x", a);
    MultiPoly P = S->x().pow(static_cast<std::uint32_t>(n));
    for (std::size_t k = 0; k < n; ++k) P += S->embed(a[k]) * S->x().pow(static_cast<std::uint32_t>(n - 1 - k));
    MultiPoly Pm = P.substitute({-S->x(), S->var(1)});
    t.expect(sp_parity_check(a) == (Pm == P), "parity disagrees with P(-x) = P(x)");
  }

  // duality with verified witness
  for (auto coeffs : std::vector<std::vector<MultiPoly>>{{R->zero(), tpoly("-t")}, {R->zero(), tpoly("-t^2 - 1")}}) {
    auto S = CoverChart::monic(R, "x", coeffs);
    for (const auto& J : {FractionalIdeal::whole(S), FractionalIdeal::principal(S, S->x())}) {
      auto d = sp_duality_check(SpectralModule::fractional(J));
      t.expect(d.verdict == DualityVerdict::Holds && d.witness_verified, "duality for " + J.to_string());
    }
  }

  // GSp translation: Phi' + mu = Phi, tr Phi' = 0, char poly shifted
  for (int i = 0; i < 50; ++i) {
    std::size_t n = 2 + 2 * (i % 2);
    HiggsChart h(R, random_matrix(R, rng, n, 2));
    auto g = gsp_translate(h);
    MultiPoly tr = R->zero();
    for (std::size_t k = 0; k < n; ++k) tr += g.phi_prime.phi()(k, k);
    bool shifted = true;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        MultiPoly want = h.phi()(r, c) - (r == c ? g.mu : R->zero());
        if (!(R->reduce(want) == g.phi_prime.phi()(r, c))) shifted = false;
      }
    t.expect(tr.is_zero() && shifted && g.trace_zero && g.shift_identity, "gsp translate");
  }
  double secs = seconds_since(t0);
  return report(6, "SL, Sp and GSp checks", t.failures == 0, tally_detail(t, secs));
}

// 7 ------------------------------------------------------------------------
bool formula_grid() {
  auto t0 = Clock::now();
  Tally t;
  for (std::int64_t r = 1; r <= 5; ++r)
    for (std::int64_t g = 0; g <= 4; ++g)
      for (std::int64_t l = 0; l <= 6; ++l)
        for (std::int64_t d = -3; d <= 3; ++d)
          for (auto G : {Group::GL, Group::SL, Group::Sp, Group::GSp}) {
            // cover degree n in the total space of L: branch divisor of degree n(n-1)l,
            // Riemann-Hurwitz for the genus, chi(M) = chi(E) for the degree of M
            bool sym = G == Group::Sp || G == Group::GSp;
            std::int64_t n = sym ? 2 * r : r;
            std::int64_t branch = n * (n - 1) * l;
            std::int64_t two_gx_minus_2 = n * (2 * g - 2) + branch;
            std::int64_t chi_o = -two_gx_minus_2 / 2;
            std::int64_t degE = G == Group::GL ? d : G == Group::GSp ? r * d : 0;
            std::int64_t dprime = degE + n * (1 - g) - chi_o;
            auto rec = degree_formulas(NumericProfile(r, g, l, d), G);
            std::string tag = to_string(G) + " r=" + std::to_string(r) + " g=" + std::to_string(g) + " l=" + std::to_string(l);
            t.expect(rec.cover_degree == n, "cover degree " + tag);
            t.expect(rec.chi == chi_o, "chi " + tag);
            t.expect(rec.deg_omega == two_gx_minus_2, "deg omega " + tag);
            t.expect(2 * rec.chi == -rec.deg_omega, "chi = -deg omega / 2 " + tag);
            t.expect(rec.d_prime == dprime, "d' " + tag);
          }
  double secs = seconds_since(t0);
  return report(7, "degree formula grid", t.failures == 0, tally_detail(t, secs));
}

// 8 ------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

bool cli_determinism() {
  auto t0 = Clock::now();
  Tally t;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("specchart_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<fs::path> sessions;
  for (const auto& e : fs::directory_iterator(fs::path(SPECCHART_SOURCE_DIR) / "sessions"))
    if (e.path().extension() == ".toml") sessions.push_back(e.path());
  std::sort(sessions.begin(), sessions.end());
  for (const auto& s : sessions) {
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      fs::path out = dir / (s.stem().string() + std::to_string(k) + ".json");
      std::string cmd = std::string(SPECCHART_CLI) + " run " + s.string() + " --seed 1234 --json " + out.string() + " > /dev/null 2>&1";
      int rc = std::system(cmd.c_str());
      int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
      t.expect(code == 0 || code == 2 || code == 3, s.filename().string() + " exit " + std::to_string(code));
      outs[k] = slurp(out);
    }
    t.expect(!outs[0].empty() && outs[0] == outs[1], s.filename().string() + " reports differ");
  }
  fs::remove_all(dir);
  double secs = seconds_since(t0);
  return report(8, "CLI report determinism", t.failures == 0 && !sessions.empty(),
                std::to_string(sessions.size()) + " sessions; " + tally_detail(t, secs));
}

}  // namespace

int main() {
  std::vector<std::function<bool()>> all{tacnode_pushforwards, norm_identities, divisor_calculus, bnr_sequences,
                                         round_trip,           group_checks,    formula_grid,     cli_determinism};
  int failed = 0;
  for (auto& c : all) {
    try {
      if (!c()) ++failed;
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion raised: " << e.what() << std::endl;
      ++failed;
    }
  }
  std::cout << (all.size() - failed) << "/" << all.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
