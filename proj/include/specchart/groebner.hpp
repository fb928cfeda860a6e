#pragma once

// Buchberger's algorithm with the product and chain criteria; returns reduced
// Groebner bases.

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "multipoly.hpp"

namespace specchart {
namespace gb {

/// Terms sorted by decreasing monomial order.
struct SortedPoly {
  std::vector<std::pair<Monomial, FieldElem>> terms;
  bool empty() const noexcept { return terms.empty(); }
  const Monomial& lm() const { return terms.front().first; }
  const FieldElem& lc() const { return terms.front().second; }
};

inline SortedPoly to_sorted(const MultiPoly& f, const MonomialOrder& ord) { return {f.sorted_terms(ord)}; }

inline MultiPoly from_sorted(const SortedPoly& f, const Field& F, std::size_t n) {
  MultiPoly p(F, n);
  for (const auto& [m, c] : f.terms) p.add_term(m, c);
  return p;
}

/// f - c * m * g, merging sorted term lists.
inline SortedPoly sub_scaled(const SortedPoly& f, const FieldElem& c, const Monomial& m, const SortedPoly& g,
                             const MonomialOrder& ord) {
  SortedPoly out;
  out.terms.reserve(f.terms.size() + g.terms.size());
  std::size_t i = 0, j = 0;
  while (i < f.terms.size() || j < g.terms.size()) {
    if (j == g.terms.size()) {
      out.terms.push_back(f.terms[i++]);
      continue;
    }
    Monomial gm = monomial_mul(g.terms[j].first, m);
    if (i == f.terms.size()) {
      out.terms.emplace_back(std::move(gm), -(c * g.terms[j].second));
      ++j;
      continue;
    }
    int cmp = ord.compare(f.terms[i].first, gm);
    if (cmp > 0) {
      out.terms.push_back(f.terms[i++]);
    } else if (cmp < 0) {
      out.terms.emplace_back(std::move(gm), -(c * g.terms[j].second));
      ++j;
    } else {
      FieldElem v = f.terms[i].second - c * g.terms[j].second;
      if (!v.is_zero()) out.terms.emplace_back(f.terms[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

/// Fully reduced normal form of f modulo G.
inline SortedPoly normal_form(SortedPoly f, const std::vector<SortedPoly>& G, const MonomialOrder& ord) {
  SortedPoly rem;
  while (!f.empty()) {
    const Monomial lt = f.lm();
    const SortedPoly* div = nullptr;
    for (const auto& g : G)
      if (!g.empty() && monomial_divides(g.lm(), lt)) {
        div = &g;
        break;
      }
    if (!div) {
      rem.terms.push_back(f.terms.front());
      f.terms.erase(f.terms.begin());
      continue;
    }
    FieldElem c = f.lc() / div->lc();
    f = sub_scaled(f, c, monomial_div(lt, div->lm()), *div, ord);
  }
  return rem;
}

inline SortedPoly make_monic(SortedPoly f) {
  if (f.empty()) return f;
  FieldElem inv = f.lc().inverse();
  for (auto& [m, c] : f.terms) c *= inv;
  return f;
}

inline SortedPoly s_polynomial(const SortedPoly& f, const SortedPoly& g, const MonomialOrder& ord) {
  Monomial l = monomial_lcm(f.lm(), g.lm());
  // both monic
  SortedPoly a;
  for (const auto& [m, c] : f.terms) a.terms.emplace_back(monomial_mul(m, monomial_div(l, f.lm())), c);
  return sub_scaled(a, g.lc().one_like(), monomial_div(l, g.lm()), g, ord);
}

/// Reduced Groebner basis (monic, sorted by decreasing leading monomial).
inline std::vector<SortedPoly> reduced_basis(const std::vector<MultiPoly>& gens, const MonomialOrder& ord) {
  std::vector<SortedPoly> G;
  std::set<std::pair<std::size_t, std::size_t>> pending;

  auto add = [&](SortedPoly h) {
    h = make_monic(std::move(h));
    std::size_t idx = G.size();
    for (std::size_t i = 0; i < idx; ++i)
      if (!G[i].empty()) pending.emplace(i, idx);
    G.push_back(std::move(h));
  };

  for (const auto& f : gens) {
    if (f.is_zero()) continue;
    SortedPoly h = normal_form(to_sorted(f, ord), G, ord);
    if (!h.empty()) add(std::move(h));
  }

  while (!pending.empty()) {
    auto best = pending.begin();
    std::uint32_t best_deg = 0;
    bool first = true;
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      std::uint32_t d = total_degree(monomial_lcm(G[it->first].lm(), G[it->second].lm()));
      if (first || d < best_deg) {
        best = it;
        best_deg = d;
        first = false;
      }
    }
    auto [i, j] = *best;
    pending.erase(best);
    const Monomial& li = G[i].lm();
    const Monomial& lj = G[j].lm();
    if (monomials_coprime(li, lj)) continue;
    Monomial l = monomial_lcm(li, lj);
    bool chain = false;
    for (std::size_t k = 0; k < G.size() && !chain; ++k) {
      if (k == i || k == j || G[k].empty()) continue;
      if (!monomial_divides(G[k].lm(), l)) continue;
      auto key = [](std::size_t a, std::size_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };
      if (!pending.count(key(i, k)) && !pending.count(key(j, k))) chain = true;
    }
    if (chain) continue;
    SortedPoly h = normal_form(s_polynomial(G[i], G[j], ord), G, ord);
    if (!h.empty()) add(std::move(h));
  }

  // minimalize
  std::vector<SortedPoly> minimal;
  for (std::size_t i = 0; i < G.size(); ++i) {
    bool redundant = false;
    for (std::size_t k = 0; k < G.size() && !redundant; ++k) {
      if (k == i) continue;
      if (monomial_divides(G[k].lm(), G[i].lm()) && (G[k].lm() != G[i].lm() || k < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(G[i]);
  }
  // interreduce
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<SortedPoly> others;
    for (std::size_t k = 0; k < minimal.size(); ++k)
      if (k != i) others.push_back(minimal[k]);
    SortedPoly head;
    head.terms.push_back(minimal[i].terms.front());
    SortedPoly tail;
    tail.terms.assign(minimal[i].terms.begin() + 1, minimal[i].terms.end());
    tail = normal_form(std::move(tail), others, ord);
    head.terms.insert(head.terms.end(), tail.terms.begin(), tail.terms.end());
    minimal[i] = make_monic(std::move(head));
  }
  std::sort(minimal.begin(), minimal.end(), [&](const SortedPoly& a, const SortedPoly& b) { return ord.compare(a.lm(), b.lm()) > 0; });
  return minimal;
}

}  // namespace gb

/// Reduced Groebner basis of the ideal generated by `gens`.
inline std::vector<MultiPoly> groebner_basis(const std::vector<MultiPoly>& gens, const MonomialOrder& ord) {
  std::vector<MultiPoly> out;
  if (gens.empty()) return out;
  const Field F = gens[0].field();
  const std::size_t n = gens[0].nvars();
  for (const auto& g : gb::reduced_basis(gens, ord)) out.push_back(gb::from_sorted(g, F, n));
  return out;
}

inline std::vector<gb::SortedPoly> sorted_basis(const std::vector<MultiPoly>& G, const MonomialOrder& ord) {
  std::vector<gb::SortedPoly> sg;
  sg.reserve(G.size());
  for (const auto& g : G) sg.push_back(gb::to_sorted(g, ord));
  return sg;
}

inline MultiPoly reduce_by_sorted(const MultiPoly& f, const std::vector<gb::SortedPoly>& G, const MonomialOrder& ord) {
  return gb::from_sorted(gb::normal_form(gb::to_sorted(f, ord), G, ord), f.field(), f.nvars());
}

/// Normal form of f modulo a Groebner basis G (w.r.t. `ord`).
inline MultiPoly reduce_by(const MultiPoly& f, const std::vector<MultiPoly>& G, const MonomialOrder& ord) {
  std::vector<gb::SortedPoly> sg;
  sg.reserve(G.size());
  for (const auto& g : G) sg.push_back(gb::to_sorted(g, ord));
  return gb::from_sorted(gb::normal_form(gb::to_sorted(f, ord), sg, ord), f.field(), f.nvars());
}

}  // namespace specchart
