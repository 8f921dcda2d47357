#pragma once

// Seeded generators shared by the test binaries.

#include "ccsymbol/algebra.hpp"
#include "ccsymbol/laurent.hpp"
#include "ccsymbol/symbol1d.hpp"
#include "ccsymbol/witt.hpp"

#include <ostream>
#include <random>
#include <set>
#include <vector>

namespace ccsymbol {
inline void PrintTo(const AlgebraElement& x, std::ostream* os) { *os << x.to_string(); }
template <class C>
void PrintTo(const Laurent<C>& x, std::ostream* os) { *os << x.to_string(); }
}  // namespace ccsymbol

namespace testsupport {

using namespace ccsymbol;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Rational rational(int span = 5, int maxden = 3) {
    Rational q(uniform(-span, span));
    q /= uniform(1, maxden);
    return q;
  }
  Rational nonzero_rational(int span = 5, int maxden = 3) {
    Rational q;
    do q = rational(span, maxden);
    while (sgn(q) == 0);
    return q;
  }

  AlgebraDescriptor algebra(int max_gens = 2, int max_order = 4) {
    int g = uniform(0, max_gens);
    std::vector<int> orders;
    for (int i = 0; i < g; ++i) orders.push_back(uniform(2, max_order));
    return AlgebraDescriptor(orders);
  }

  AlgebraElement nilpotent(const AlgebraDescriptor& d, double density = 0.5) {
    AlgebraElement x(d);
    for (std::size_t i = 1; i < d.basis_size(); ++i)
      if (coin(density)) x.set_coeff(i, rational());
    return x;
  }
  AlgebraElement element(const AlgebraDescriptor& d) {
    AlgebraElement x = nilpotent(d);
    x.set_coeff(0, rational());
    return x;
  }
  AlgebraElement unit(const AlgebraDescriptor& d) {
    AlgebraElement x = nilpotent(d);
    x.set_coeff(0, nonzero_rational());
    return x;
  }
  AlgebraElement principal_unit(const AlgebraDescriptor& d) { return nilpotent(d) + Rational(1); }

  // Random decomposition with plus params up to T and a few nilpotent minus params.
  WittDecomposition1D witt_1d(const AlgebraDescriptor& d, int T, double density = 0.4) {
    WittDecomposition1D w;
    w.leading = unit(d);
    w.omega = uniform(-3, 3);
    for (int i = 1; i <= T; ++i)
      if (coin(density)) {
        auto a = element(d);
        if (!a.is_zero()) w.plus_params.emplace(i, a);
      }
    if (d.num_generators() > 0)
      for (int i = 1; i <= 3; ++i)
        if (coin(density)) {
          auto a = nilpotent(d);
          if (!a.is_zero()) w.minus_params.emplace(i, a);
        }
    w.plus_trunc = kExact;
    return w;
  }

  // Random 2D decomposition with at most `nfactors` factors.
  WittDecomposition2D witt_2d(const AlgebraDescriptor& d, int nfactors) {
    WittDecomposition2D w;
    w.leading = unit(d);
    w.omega1 = uniform(-2, 2);
    w.omega2 = uniform(-2, 2);
    int n = uniform(0, nfactors);
    for (int k = 0; k < n; ++k) {
      int i = uniform(-2, 3), j = uniform(-2, 3);
      if (i == 0 && j == 0) continue;
      bool nil = i < 0 || (i == 0 && j < 0);
      if (nil && d.num_generators() == 0) continue;
      AlgebraElement a = nil ? nilpotent(d, 0.7) : element(d);
      if (a.is_zero()) continue;
      w.params[{i, j}] = a;
    }
    for (const auto& kv : w.params) w.row_trunc[kv.first.first] = kExact;
    return w;
  }
};

// Exact product a t^w prod (1 - a_i t^i) prod (1 - a_{-i} t^{-i}).
inline LaurentSeries1D expand_1d(const WittDecomposition1D& w) {
  const auto& d = w.descriptor();
  LaurentSeries1D r = LaurentSeries1D::monomial(d, w.leading, w.omega);
  for (const auto& [i, a] : w.plus_params) {
    LaurentSeries1D fac = LaurentSeries1D::one(d);
    fac.set(i, -a);
    r = r * fac;
  }
  for (const auto& [i, a] : w.minus_params) {
    LaurentSeries1D fac = LaurentSeries1D::one(d);
    fac.set(-i, -a);
    r = r * fac;
  }
  return r;
}

// Exact product a t1^w1 t2^w2 prod (1 - a_ij t1^j t2^i).
inline LaurentSeries2D expand_2d(const WittDecomposition2D& w) {
  const auto& d = w.descriptor();
  LaurentSeries2D r = monomial_2d(w.leading, w.omega1, w.omega2);
  for (const auto& [key, a] : w.params) {
    LaurentSeries2D fac = LaurentSeries2D::one(d) - monomial_2d(a, key.second, key.first);
    r = r * fac;
  }
  return r;
}

// Exact Gamma element with a finite Laurent expansion.
inline LaurentSeries1D random_gamma(Gen& g, const AlgebraDescriptor& d) {
  int w = g.uniform(-2, 2);
  LaurentSeries1D f = monomial_1d(g.unit(d), w);
  for (int n = w + 1; n <= w + 3; ++n)
    if (g.coin()) f.set(n, g.element(d));
  for (int n = w - 2; n < w; ++n)
    if (g.coin()) f.set(n, g.nilpotent(d));
  return f;
}

// Up to `maxroots` distinct roots near -3..3, multiplicities in [-maxmult, maxmult] \ {0}.
inline FactoredRational random_rational(Gen& g, const AlgebraDescriptor& d, int maxroots, int maxmult = 2) {
  FactoredRational f{g.unit(d), {}};
  int n = g.uniform(0, maxroots);
  std::set<long> used;
  for (int k = 0; k < n; ++k) {
    long c = g.uniform(-3, 3);
    if (!used.insert(c).second) continue;
    int m = g.uniform(-maxmult, maxmult);
    if (m == 0) m = 1;
    f.roots.push_back({g.nilpotent(d) + Rational(c), m});
  }
  return f;
}

}  // namespace testsupport
