#pragma once

// Witt-parameter factorizations
//   f = a0 t^w prod_{i>=1} (1 - a_i t^i) prod_{i>=1} (1 - a_{-i} t^{-i})
// and the two-variable analogue
//   f = a00 t1^w1 t2^w2 prod_{i,j} (1 - a_{ij} t1^j t2^i).

#include "ccsymbol/algebra.hpp"
#include "ccsymbol/laurent.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

namespace ccsymbol {

struct WittDecomposition1D {
  AlgebraElement leading;
  int omega = 0;
  std::map<int, AlgebraElement> plus_params;   // i -> a_i, i >= 1
  std::map<int, AlgebraElement> minus_params;  // i -> a_{-i}, i >= 1
  int plus_trunc = 0;                          // a_1..a_{plus_trunc} are determined

  const AlgebraDescriptor& descriptor() const { return leading.descriptor(); }
  AlgebraElement plus(int i) const {
    auto it = plus_params.find(i);
    return it == plus_params.end() ? AlgebraElement(descriptor()) : it->second;
  }
  AlgebraElement minus(int i) const {
    auto it = minus_params.find(i);
    return it == minus_params.end() ? AlgebraElement(descriptor()) : it->second;
  }
  int minus_depth() const { return minus_params.empty() ? 0 : minus_params.rbegin()->first; }
};

template <class C>
struct PlusMinus {
  Laurent<C> plus;
  Laurent<C> minus;
};

// F = g h with g a unit power series and h in 1 + t^{-1} I[t^{-1}].
// F must have a unit constant term and nilpotent coefficients below it.
template <class C>
PlusMinus<C> split_plus_minus(const Laurent<C>& F, std::span<const int> inner_caps = {}) {
  const auto& d = F.descriptor();
  auto w = leading_unit_index(F);
  if (!w || *w != 0) throw std::domain_error("split_plus_minus: input must have valuation 0");
  if (F.prec() < -1) throw insufficient_truncation("split_plus_minus: insufficient truncation");
  int L = F.empty() ? 0 : std::max(0, -F.first());
  Laurent<C> one = Laurent<C>::one(d);
  Laurent<C> h = one, g;
  // Each round gains one power of I, so K rounds reach the fixed point.
  for (int round = 0; round <= d.nilpotency_index(); ++round) {
    g = (F * nilpotent_geometric(h - one)).plus_part();
    if (g.prec() < 0 || !leading_unit_index(g) || *leading_unit_index(g) != 0)
      throw insufficient_truncation("split_plus_minus: insufficient truncation");
    Laurent<C> q = F * psinv(g, std::max(L, 0), inner_caps);
    if (q.prec() < -1) throw insufficient_truncation("split_plus_minus: insufficient truncation");
    Laurent<C> hn = one + q.minus_part();
    if (hn == h) break;
    h = std::move(hn);
  }
  Laurent<C> prod = g * h;
  int caps_buf[8];
  std::size_t nc = 1 + std::min<std::size_t>(inner_caps.size(), 7);
  caps_buf[0] = std::min(prod.prec(), F.prec());
  for (std::size_t k = 1; k < nc; ++k)
    caps_buf[k] = std::min({inner_caps[k - 1], prod.inner_prec(), F.inner_prec()});
  if (!agree_upto(prod, F, std::span<const int>(caps_buf, nc)))
    throw std::runtime_error("split_plus_minus: iteration did not converge");
  return {g, h};
}

struct WittPlus {
  AlgebraElement constant;
  std::map<int, AlgebraElement> params;
  int trunc = 0;
};

// g = g(0) prod_{i<=T} (1 - a_i t^i) mod t^{T+1}.
inline WittPlus witt_plus(const LaurentSeries1D& g, int T) {
  if (g.empty() || g.first() < 0) throw std::domain_error("witt_plus: input must be a power series");
  AlgebraElement c0 = g.coeff(0);
  if (!c0.is_unit()) throw std::domain_error("witt_plus: constant term must be a unit");
  const auto& d = g.descriptor();
  int M = std::min(T, g.prec());
  WittPlus out{c0, {}, M};
  LaurentSeries1D rem = g.scaled(invert(c0)).truncated(M);
  for (int i = 1; i <= M; ++i) {
    AlgebraElement a = -rem.coeff(i);
    if (a.is_zero()) continue;
    out.params.emplace(i, a);
    // divide by (1 - a t^i)
    LaurentSeries1D geo(d, M);
    AlgebraElement pw = one(d);
    for (int n = 0; n * i <= M; ++n) {
      geo.set(n * i, pw);
      pw = pw * a;
    }
    rem = rem * geo;
  }
  return out;
}

// h = prod_{i>=1} (1 - a_{-i} t^{-i}) exactly, for h in 1 + t^{-1} I[t^{-1}].
inline std::map<int, AlgebraElement> witt_minus(const LaurentSeries1D& h) {
  const auto& d = h.descriptor();
  LaurentSeries1D one = LaurentSeries1D::one(d);
  std::map<int, AlgebraElement> params;
  if (h == one) return params;
  if (!h.is_exact() || h.last() != 0 || !(h.coeff(0).is_one()))
    throw std::domain_error("witt_minus: input must lie in 1 + t^-1 I[t^-1]");
  h.for_each([&](int n, const AlgebraElement& c) {
    if (n < 0 && !c.in_ideal()) throw std::domain_error("witt_minus: tail must be nilpotent");
  });
  int K = d.nilpotency_index();
  int bound = K * std::max(1, -h.first());
  LaurentSeries1D rem = h;
  for (int i = 1; rem != one; ++i) {
    if (i > bound) throw std::runtime_error("witt_minus: peeling exceeded nilpotency bound");
    AlgebraElement a = -rem.coeff(-i);
    if (a.is_zero()) continue;
    if (!a.in_ideal()) throw std::logic_error("witt_minus: non-nilpotent parameter");
    params.emplace(i, a);
    LaurentSeries1D geo(d);
    AlgebraElement pw = one.coeff(0);
    for (int n = 0; n < K && !pw.is_zero(); ++n) {
      geo.set(-n * i, pw);
      pw = pw * a;
    }
    rem = rem * geo;
  }
  return params;
}

inline WittDecomposition1D witt_decompose_1d(const LaurentSeries1D& f, int T) {
  auto w = gamma_valuation(f);
  if (!w) throw std::domain_error("witt_decompose_1d: series is not in Gamma(A, I)");
  AlgebraElement a0 = f.coeff(*w);
  LaurentSeries1D F = f.scaled(invert(a0)).shifted(-*w);
  auto [g, h] = split_plus_minus(F);
  WittDecomposition1D out;
  out.omega = *w;
  out.minus_params = witt_minus(h);
  int D = h.empty() ? 0 : -h.first();
  WittPlus wp = witt_plus(g, padd(T, D));
  out.leading = a0 * wp.constant;
  out.plus_params = std::move(wp.params);
  out.plus_trunc = wp.trunc;
  return out;
}

// prod_{i=1}^{M} (1 - a_i t^i) as a series known to t^M.
inline LaurentSeries1D plus_product(const std::map<int, AlgebraElement>& params,
                                    const AlgebraDescriptor& d, int M) {
  LaurentSeries1D r = LaurentSeries1D::one(d);
  for (const auto& [i, a] : params) {
    if (i > M) break;
    LaurentSeries1D fac = LaurentSeries1D::one(d);
    fac.set(i, -a);
    r = r * fac;
  }
  return r.truncated(M);
}

inline LaurentSeries1D minus_product(const std::map<int, AlgebraElement>& params,
                                     const AlgebraDescriptor& d) {
  LaurentSeries1D r = LaurentSeries1D::one(d);
  for (const auto& [i, a] : params) {
    LaurentSeries1D fac = LaurentSeries1D::one(d);
    fac.set(-i, -a);
    r = r * fac;
  }
  return r;
}

// Multiplies the stored factors; known modulo t^{omega+T+1} when the
// decomposition carries enough plus parameters.
inline LaurentSeries1D reconstruct_1d(const WittDecomposition1D& dec, int T) {
  const auto& d = dec.descriptor();
  LaurentSeries1D mp = minus_product(dec.minus_params, d);
  int M = std::min(dec.plus_trunc, padd(T, mp.empty() ? 0 : -mp.first()));
  LaurentSeries1D r = plus_product(dec.plus_params, d, M) * mp;
  r = r.scaled(dec.leading).shifted(dec.omega);
  return r.truncated(padd(dec.omega, T));
}

// ---------------------------------------------------------------------------
// Two variables.  Params are keyed (i, j) for the factor 1 - a t1^j t2^i.

using ParamKey = std::pair<int, int>;

struct WittDecomposition2D {
  AlgebraElement leading;
  int omega1 = 0;
  int omega2 = 0;
  std::map<ParamKey, AlgebraElement> params;
  std::map<int, int> row_trunc;  // row i -> params a_{i,j} determined for j <= value
  int T1 = 0;
  int T2 = 0;

  const AlgebraDescriptor& descriptor() const { return leading.descriptor(); }
  AlgebraElement param(int i, int j) const {
    auto it = params.find({i, j});
    return it == params.end() ? AlgebraElement(descriptor()) : it->second;
  }
  std::map<int, AlgebraElement> row(int i) const {
    std::map<int, AlgebraElement> r;
    for (auto it = params.lower_bound({i, std::numeric_limits<int>::min()});
         it != params.end() && it->first.first == i; ++it)
      r.emplace(it->first.second, it->second);
    return r;
  }
  int min_row() const { return params.empty() ? 0 : std::min(0, params.begin()->first.first); }
};

namespace detail {

inline LaurentSeries2D shift_inner(const LaurentSeries2D& F, int k) {
  LaurentSeries2D r(F.descriptor(), F.prec());
  F.for_each([&](int n, const LaurentSeries1D& c) { r.set(n, c.shifted(k)); });
  return r;
}

// p_m = sum_j a_j^m t1^{jm}, m = 1..mmax, for a row known for j <= r.
inline std::vector<LaurentSeries1D> row_power_sums(const std::map<int, AlgebraElement>& row, int r,
                                                   int mmax, const AlgebraDescriptor& d) {
  std::vector<LaurentSeries1D> p(static_cast<std::size_t>(mmax + 1), LaurentSeries1D(d));
  for (int m = 1; m <= mmax; ++m) {
    int prec = r >= kExact ? kExact : padd(static_cast<long>(m) * (r + 1), -1);
    LaurentSeries1D s(d, prec);
    for (const auto& [j, a] : row) {
      if (j > r) continue;
      int e = j * m;
      if (e > prec) continue;
      s.set(e, s.coeff(e) + pow(a, m));
    }
    p[static_cast<std::size_t>(m)] = s;
  }
  return p;
}

// sum_l c_l t2^{i l} for l = 0..lmax where c_l are the complete homogeneous
// (invert) or signed elementary (forward) symmetric functions of a_j t1^j.
inline LaurentSeries2D row_series(const std::map<int, AlgebraElement>& row, int r, int i,
                                  int lmax, bool inverse, const AlgebraDescriptor& d) {
  auto p = row_power_sums(row, r, lmax, d);
  std::vector<LaurentSeries1D> c(static_cast<std::size_t>(lmax + 1), LaurentSeries1D(d));
  c[0] = LaurentSeries1D::one(d);
  for (int l = 1; l <= lmax; ++l) {
    LaurentSeries1D acc(d);
    for (int m = 1; m <= l; ++m) {
      LaurentSeries1D term = p[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(l - m)];
      if (!inverse && m % 2 == 0) term = -term;
      acc += term;
    }
    c[static_cast<std::size_t>(l)] = acc.scaled(AlgebraElement(d, frac(1, l)));
  }
  LaurentSeries2D out(d, kExact);
  for (int l = 0; l <= lmax; ++l) {
    LaurentSeries1D cl = c[static_cast<std::size_t>(l)];
    if (!inverse && l % 2 == 1) cl = -cl;
    out.set(i * l, cl);
  }
  return out;
}

}  // namespace detail

// Product over j of (1 - a_j t1^j t2^i), as a series known to t2^{T2}.
inline LaurentSeries2D row_product(const std::map<int, AlgebraElement>& row, int r, int i, int T2,
                                   const AlgebraDescriptor& d) {
  if (i == 0) throw std::invalid_argument("row_product: use the one-variable product for row 0");
  if (r >= kExact && row.empty()) return LaurentSeries2D::one(d);
  int K = d.nilpotency_index();
  if (i < 0) return detail::row_series(row, r, i, K - 1, false, d);
  int lmax = T2 / i;
  LaurentSeries2D s = detail::row_series(row, r, i, lmax, false, d);
  return s.truncated(T2);
}

inline LaurentSeries2D row_inverse(const std::map<int, AlgebraElement>& row, int r, int i, int T2,
                                   const AlgebraDescriptor& d) {
  int K = d.nilpotency_index();
  if (i < 0) return detail::row_series(row, r, i, K - 1, true, d);
  int lmax = T2 / i;
  return detail::row_series(row, r, i, lmax, true, d).truncated(T2);
}

// Peels rows i = 1..T2 of f in 1 + t2 A((t1))[[t2]].
inline std::map<int, std::pair<std::map<int, AlgebraElement>, int>> witt_plus_2d_rows(
    const LaurentSeries2D& f, int T2) {
  const auto& d = f.descriptor();
  std::map<int, std::pair<std::map<int, AlgebraElement>, int>> rows;
  if (f.empty() || f.first() != 0) throw std::domain_error("witt_plus_2d: input must start at level 0");
  LaurentSeries1D lvl0 = f.coeff(0);
  {
    LaurentSeries1D one1 = LaurentSeries1D::one(d);
    int p = lvl0.prec();
    if (!agree_upto(lvl0, one1, p) || p < 0)
      throw std::domain_error("witt_plus_2d: outer constant level must be 1");
  }
  int M = std::min(T2, f.prec());
  LaurentSeries2D rem = f.truncated(M);
  for (int i = 1; i <= M; ++i) {
    LaurentSeries1D lv = rem.coeff(i);
    std::map<int, AlgebraElement> row;
    lv.for_each([&](int j, const AlgebraElement& c) { row.emplace(j, -c); });
    int r = lv.prec();
    rows[i] = {row, r};
    if (row.empty()) continue;
    rem = rem * row_inverse(row, r, i, M, d);
  }
  return rows;
}

// Peels rows i = -1, -2, ... of f in 1 + t2^{-1} I((t1))[t2^{-1}].
inline std::map<int, std::pair<std::map<int, AlgebraElement>, int>> witt_minus_2d_rows(
    const LaurentSeries2D& f) {
  const auto& d = f.descriptor();
  std::map<int, std::pair<std::map<int, AlgebraElement>, int>> rows;
  LaurentSeries2D rem = f;
  auto done = [&](const LaurentSeries2D& x) {
    bool ok = true;
    x.for_each([&](int n, const LaurentSeries1D& c) {
      if (n < 0 && !c.empty()) ok = false;
    });
    return ok;
  };
  if (!f.empty() && f.last() > 0) throw std::domain_error("witt_minus_2d: positive levels present");
  f.for_each([&](int n, const LaurentSeries1D& c) {
    if (n < 0 && !CoeffTraits<LaurentSeries1D>::nilpotent(c))
      throw std::domain_error("witt_minus_2d: tail must lie in I((t1))");
  });
  int K = d.nilpotency_index();
  int bound = K * std::max(1, f.empty() ? 1 : -f.first());
  for (int i = -1; !done(rem); --i) {
    if (-i > bound) throw std::runtime_error("witt_minus_2d: peeling exceeded nilpotency bound");
    LaurentSeries1D lv = rem.coeff(i);
    std::map<int, AlgebraElement> row;
    lv.for_each([&](int j, const AlgebraElement& c) {
      if (!c.in_ideal()) throw std::logic_error("witt_minus_2d: non-nilpotent parameter");
      row.emplace(j, -c);
    });
    if (row.empty()) continue;
    int r = lv.prec();
    rows[i] = {row, r};
    rem = rem * row_inverse(row, r, i, 0, d);
  }
  return rows;
}

namespace detail {

// Product of the negative rows. Its formal t2-depth can exceed the deepest
// row when products of nilpotents vanish only up to t1-precision.
inline LaurentSeries2D minus_rows_product(const WittDecomposition2D& dec) {
  const auto& d = dec.descriptor();
  LaurentSeries2D minus = LaurentSeries2D::one(d);
  for (const auto& [i, rt] : dec.row_trunc)
    if (i < 0) minus = minus * row_product(dec.row(i), rt, i, 0, d);
  return minus;
}

inline int formal_depth(const LaurentSeries2D& minus) { return minus.empty() ? 0 : std::max(0, -minus.first()); }

inline LaurentSeries2D reconstruct_2d_impl(const WittDecomposition2D& dec, int T2) {
  const auto& d = dec.descriptor();
  LaurentSeries2D minus = minus_rows_product(dec);
  int rows_to = padd(T2, formal_depth(minus));
  // Row 0 as a one-variable decomposition.
  std::map<int, AlgebraElement> p0, m0;
  for (const auto& [j, a] : dec.row(0)) {
    if (j > 0) p0.emplace(j, a);
    if (j < 0) m0.emplace(-j, a);
  }
  int r0t = dec.row_trunc.count(0) ? dec.row_trunc.at(0) : kExact;
  LaurentSeries1D g0 = plus_product(p0, d, r0t) * minus_product(m0, d);
  LaurentSeries2D plus = lift_1d(g0);
  int last_plus = 0;
  for (const auto& [i, rt] : dec.row_trunc) {
    if (i <= 0 || i > rows_to) continue;
    plus = plus * row_product(dec.row(i), rt, i, rows_to, d);
    last_plus = i;
  }
  // Plus rows beyond the last computed one are unknown.
  plus = plus.truncated(std::min(rows_to, last_plus));
  LaurentSeries2D r = plus * minus;
  r = r.scaled(dec.leading);
  r = shift_inner(r, dec.omega1).shifted(dec.omega2);
  return r;
}

}  // namespace detail

inline LaurentSeries2D reconstruct_2d(const WittDecomposition2D& dec, int T1, int T2) {
  LaurentSeries2D r = detail::reconstruct_2d_impl(dec, T2);
  return cap_2d(r, padd(dec.omega1, T1), padd(dec.omega2, T2));
}

// Decomposes f, raising the working t1-precision until every factor row is
// determined far enough that the product is known mod (t1^{w1+T1+1}, t2^{w2+T2+1}).
inline WittDecomposition2D witt_decompose_2d(const LaurentSeries2D& f, int T1, int T2) {
  auto v = gamma_valuation_2d(f);
  if (!v) throw std::domain_error("witt_decompose_2d: series is not in Gamma");
  const auto& d = f.descriptor();
  AlgebraElement a = f.coeff(v->omega2).coeff(v->omega1);
  LaurentSeries2D F0 = detail::shift_inner(f.scaled(invert(a)), -v->omega1).shifted(-v->omega2);
  bool exact_inner = f.inner_prec() >= kExact;

  int W = T1 + 4;
  for (int attempt = 0; attempt < 10; ++attempt) {
    LaurentSeries2D F = cap_2d(F0, W, kExact);
    int inner[1] = {W};
    std::optional<PlusMinus<LaurentSeries1D>> gh;
    std::optional<WittDecomposition1D> row0;
    try {
      gh = split_plus_minus(F, std::span<const int>(inner, 1));
      row0 = witt_decompose_1d(gh->plus.coeff(0), W);
    } catch (const insufficient_truncation&) {
      // inner precision ran out during the split or on row 0
      if (!exact_inner) throw;
      W = 2 * W + 4;
      continue;
    }
    auto& [G, H] = *gh;
    int D2 = H.empty() ? 0 : -H.first();

    WittDecomposition2D out;
    out.omega1 = v->omega1;
    out.omega2 = v->omega2;
    out.T1 = T1;
    out.T2 = T2;

    // Row 0 from the constant level of the plus factor.
    LaurentSeries1D G0 = G.coeff(0);
    const WittDecomposition1D& d0 = *row0;
    if (d0.omega != 0) throw std::logic_error("witt_decompose_2d: row 0 has nonzero valuation");
    out.leading = a * d0.leading;
    int r0 = d0.plus_trunc;
    for (const auto& [j, p] : d0.plus_params)
      if (j <= r0) out.params.emplace(ParamKey{0, j}, p);
    for (const auto& [j, p] : d0.minus_params) out.params.emplace(ParamKey{0, -j}, p);
    out.row_trunc[0] = r0;

    auto minus_rows = witt_minus_2d_rows(H);
    for (auto& [i, rr] : minus_rows) {
      for (const auto& [j, p] : rr.first) out.params.emplace(ParamKey{i, j}, p);
      out.row_trunc[i] = rr.second;
    }
    D2 = std::max(D2, detail::formal_depth(detail::minus_rows_product(out)));

    int caps1[1] = {W};
    LaurentSeries1D G0inv = invert(G0, std::span<const int>(caps1, 1));
    LaurentSeries2D Gn = G * G0inv;
    if (Gn.coeff(0).prec() < 0) {
      if (!exact_inner) throw insufficient_truncation("witt_decompose_2d: insufficient inner truncation");
      W = 2 * W + 4;
      continue;
    }
    Gn.set(0,LaurentSeries1D::one(d).truncated(Gn.coeff(0).prec()));
    auto plus_rows = witt_plus_2d_rows(Gn, padd(T2, D2));
    for (auto& [i, rr] : plus_rows) {
      for (const auto& [j, p] : rr.first) out.params.emplace(ParamKey{i, j}, p);
      out.row_trunc[i] = rr.second;
    }

    LaurentSeries2D rec = detail::reconstruct_2d_impl(out, T2);
    int need1 = padd(v->omega1, T1), need2 = padd(v->omega2, T2);
    bool enough = rec.prec() >= need2;
    rec.for_each([&](int n, const LaurentSeries1D& c) {
      if (n <= need2 && c.prec() < need1) enough = false;
    });
    if (enough || !exact_inner) {
      LaurentSeries2D low = rec.truncated(need2);
      int caps[2] = {std::min(need2, rec.prec()), std::min(need1, low.inner_prec())};
      if (!agree_upto(cap_2d(rec, caps[1], caps[0]), cap_2d(f, caps[1], caps[0]),
                      std::span<const int>(caps, 2)))
        throw std::runtime_error("witt_decompose_2d: reconstruction check failed");
      return out;
    }
    int worst = rec.inner_prec();
    W += std::max(4, need1 - std::min(worst, need1) + 2);
  }
  throw std::runtime_error("witt_decompose_2d: working precision did not converge");
}

}  // namespace ccsymbol
