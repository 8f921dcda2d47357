#pragma once

// One-variable Contou-Carrere symbol from Witt parameters, the tame symbol,
// and the reciprocity product over P^1.

#include "ccsymbol/algebra.hpp"
#include "ccsymbol/laurent.hpp"
#include "ccsymbol/witt.hpp"

#include <numeric>
#include <set>
#include <vector>

namespace ccsymbol {

// tame: agrees with (-1)^{v(f)v(g)} g^{v(f)}/f^{v(g)} when I = 0.
// displayed: the inverse, carrying a0^{v(g)} in the numerator.
enum class Orientation { tame, displayed };

struct SymbolFactor1D {
  int j = 0, k = 0;
  AlgebraElement factor;  // (1 - x^{k/(j,k)} y^{j/(j,k)})^{(j,k)}
};

struct SymbolValue1D {
  AlgebraElement value;
  int sign_exponent = 0;  // v(f) v(g) mod 2
  AlgebraElement leading;  // a0^{v(g)} / b0^{v(f)}
  std::vector<SymbolFactor1D> numerator_factors;    // a_j with b_{-k}
  std::vector<SymbolFactor1D> denominator_factors;  // a_{-j} with b_k
  Orientation orientation = Orientation::tame;

  // Product of the recorded pieces in the requested orientation.
  AlgebraElement assembled() const {
    AlgebraElement r = leading;
    if (sign_exponent) r = -r;
    for (const auto& f : numerator_factors) r = r * f.factor;
    for (const auto& f : denominator_factors) r = r * invert(f.factor);
    return orientation == Orientation::tame ? invert(r) : r;
  }
};

namespace detail {

inline WittDecomposition1D decompose_for_symbol(const LaurentSeries1D& f, int T) {
  auto dec = witt_decompose_1d(f, T);
  if (dec.plus_trunc < T)
    throw insufficient_truncation("symbol: plus parameters needed up to index " + std::to_string(T));
  return dec;
}

inline void collect_factors(const std::map<int, AlgebraElement>& plus, int T,
                            const std::map<int, AlgebraElement>& minus, bool plus_first,
                            std::vector<SymbolFactor1D>& out) {
  for (const auto& [m, y] : minus)
    for (const auto& [p, x] : plus) {
      if (p > T) break;
      long g = std::gcd(p, m);
      // x = a_p raised to m/g, y = b_{-m} raised to p/g
      AlgebraElement z = pow(x, m / g) * pow(y, p / g);
      if (z.is_zero()) continue;
      AlgebraElement fac = pow(Rational(1) - z, g);
      if (plus_first)
        out.push_back({p, static_cast<int>(m), fac});
      else
        out.push_back({static_cast<int>(m), p, fac});
    }
}

}  // namespace detail

inline SymbolValue1D cc_symbol_1d(const LaurentSeries1D& f, const LaurentSeries1D& g,
                                  Orientation orient = Orientation::tame) {
  if (f.descriptor() != g.descriptor()) throw std::invalid_argument("algebra descriptor mismatch");
  const auto& d = f.descriptor();
  int K = d.nilpotency_index();
  // Only the minus depths matter for how far the plus side must be known:
  // x^{m/g} y^{p/g} vanishes once p/g >= K, so p <= (K-1) m suffices.
  auto f0 = witt_decompose_1d(f, 0);
  auto g0 = witt_decompose_1d(g, 0);
  int Tf = (K - 1) * g0.minus_depth();
  int Tg = (K - 1) * f0.minus_depth();
  auto df = detail::decompose_for_symbol(f, Tf);
  auto dg = detail::decompose_for_symbol(g, Tg);

  SymbolValue1D s;
  s.orientation = orient;
  s.sign_exponent = ((df.omega % 2) * (dg.omega % 2)) != 0 ? 1 : 0;
  s.leading = pow(df.leading, dg.omega) * pow(dg.leading, -df.omega);
  detail::collect_factors(df.plus_params, Tf, dg.minus_params, true, s.numerator_factors);
  // denominator: a_{-j} with b_k, recorded as (j, k)
  detail::collect_factors(dg.plus_params, Tg, df.minus_params, false, s.denominator_factors);
  s.value = s.assembled();
  return s;
}

// Evaluates (-1)^{v(f)v(g)} g^{v(f)} / f^{v(g)} at the point directly.
inline AlgebraElement tame_symbol(const LaurentSeries1D& f, const LaurentSeries1D& g) {
  for (const auto* s : {&f, &g})
    s->for_each([](int, const AlgebraElement& c) {
      if (!(c.reduced() == c)) throw std::invalid_argument("tame_symbol: inputs must have no nilpotent part");
    });
  auto vf = gamma_valuation(f), vg = gamma_valuation(g);
  if (!vf || !vg) throw std::domain_error("tame_symbol: series is not in Gamma(A, I)");
  AlgebraElement f0 = f.coeff(*vf), g0 = g.coeff(*vg);
  AlgebraElement r = pow(g0, *vf) * pow(f0, -*vg);
  return ((*vf % 2) && (*vg % 2)) ? -r : r;
}

inline SymbolValue1D steinberg_check(const LaurentSeries1D& f, Orientation orient = Orientation::tame) {
  LaurentSeries1D h = LaurentSeries1D::one(f.descriptor()) - f;
  if (!gamma_valuation(h)) throw std::domain_error("steinberg_check: 1 - f is not in Gamma(A, I)");
  return cc_symbol_1d(f, h, orient);
}

struct LocalSymbol {
  ProjectivePoint point;
  SymbolValue1D symbol;
};

// Support of div f + div g together with infinity, sorted.
inline std::vector<ProjectivePoint> weil_support(const FactoredRational& f, const FactoredRational& g) {
  std::set<ProjectivePoint> pts{ProjectivePoint::inf()};
  for (const auto* h : {&f, &g})
    for (const auto& r : h->roots) pts.insert(ProjectivePoint::at(r.root.constant_term()));
  return {pts.begin(), pts.end()};
}

inline SymbolValue1D local_symbol(const FactoredRational& f, const FactoredRational& g,
                                  const ProjectivePoint& p, Orientation orient = Orientation::tame) {
  int T = 4 * f.leading.descriptor().nilpotency_index();
  for (int attempt = 0;; ++attempt) {
    try {
      return cc_symbol_1d(local_expansion(f, p, T), local_expansion(g, p, T), orient);
    } catch (const insufficient_truncation&) {
      if (attempt >= 6) throw;
      T *= 2;
    }
  }
}

inline std::vector<LocalSymbol> weil_symbols(const FactoredRational& f, const FactoredRational& g,
                                             Orientation orient = Orientation::tame) {
  std::vector<LocalSymbol> out;
  for (const auto& p : weil_support(f, g)) out.push_back({p, local_symbol(f, g, p, orient)});
  return out;
}

inline AlgebraElement weil_product(const FactoredRational& f, const FactoredRational& g,
                                   Orientation orient = Orientation::tame) {
  AlgebraElement r = one(f.leading.descriptor());
  for (const auto& ls : weil_symbols(f, g, orient)) r = r * ls.symbol.value;
  return r;
}

}  // namespace ccsymbol
