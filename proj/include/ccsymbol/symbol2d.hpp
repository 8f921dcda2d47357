#pragma once

// Two-variable Contou-Carrere symbol: per-case log contributions for triples
// of simple factors, the exact lattice sums they come from, the assembled
// symbol, and the semi-local sum for a two-term third factor.
//
// Monomials are written x^i y^j with x = t2 and y = t1, so an exponent pair
// (i, j) is the same as a WittDecomposition2D key.

#include "ccsymbol/algebra.hpp"
#include "ccsymbol/laurent.hpp"
#include "ccsymbol/witt.hpp"

#include <array>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ccsymbol {

struct Exponent2 {
  long i = 0, j = 0;
  bool operator==(const Exponent2&) const = default;
};

struct MonomialExponents {
  std::array<Exponent2, 3> e{};
  long i(int k) const { return e[k - 1].i; }
  long j(int k) const { return e[k - 1].j; }
  MonomialExponents rotated() const { return {{e[1], e[2], e[0]}}; }
};

struct KernelData {
  long m1 = 0, m2 = 0, m3 = 0;
  long d = 0;
  // every m_k nonzero with a common sign
  bool positive_kernel() const {
    return (m1 > 0 && m2 > 0 && m3 > 0) || (m1 < 0 && m2 < 0 && m3 < 0);
  }
};

struct degenerate_kernel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline long sign_of(long v) { return (v > 0) - (v < 0); }

inline long det2(long a, long b, long c, long d) { return a * d - b * c; }

inline KernelData kernel_data(const MonomialExponents& e) {
  KernelData k;
  k.m1 = e.i(2) * e.j(3) - e.i(3) * e.j(2);
  k.m2 = e.i(3) * e.j(1) - e.i(1) * e.j(3);
  k.m3 = e.i(1) * e.j(2) - e.i(2) * e.j(1);
  k.d = std::gcd(std::gcd(std::labs(k.m1), std::labs(k.m2)), std::labs(k.m3));
  if (k.d == 0) throw degenerate_kernel("kernel_data: exponent rows are parallel");
  return k;
}

// The closed forms are written once for two coefficient rings: exact
// AlgebraElement and complex numbers (numerical verification).
using cplx = std::complex<double>;

namespace detail {
inline AlgebraElement rpow(const AlgebraElement& x, long n) { return pow(x, n); }
inline cplx rpow(cplx x, long n) {
  cplx r = 1.0, b = n < 0 ? 1.0 / x : x;
  for (long k = std::labs(n); k > 0; k >>= 1, b *= b)
    if (k & 1) r *= b;
  return r;
}
inline bool rzero(const AlgebraElement& x) { return x.is_zero(); }
inline bool rzero(cplx x) { return x == cplx(0.0); }
}  // namespace detail

// coeff * log(1 - z)
template <class R>
struct BasicLogTerm {
  long coeff = 0;
  R z;
};
using LogTerm = BasicLogTerm<AlgebraElement>;
using ComplexLogTerm = BasicLogTerm<cplx>;

// principal branch
inline cplx log_value(const std::vector<ComplexLogTerm>& terms) {
  cplx r = 0.0;
  for (const auto& t : terms) r += static_cast<double>(t.coeff) * std::log(1.0 - t.z);
  return r;
}

inline AlgebraElement log_value(const std::vector<LogTerm>& terms, const AlgebraDescriptor& d) {
  AlgebraElement r(d);
  for (const auto& t : terms) r = r + log_principal(Rational(1) - t.z) * Rational(t.coeff);
  return r;
}

inline AlgebraElement factor_value(const std::vector<LogTerm>& terms, const AlgebraDescriptor& d,
                                   long sign = 1) {
  AlgebraElement r = one(d);
  for (const auto& t : terms) {
    AlgebraElement base = Rational(1) - t.z;
    if (!base.is_unit()) throw std::domain_error("symbol factor 1 - z is not a unit");
    r = r * pow(base, sign * t.coeff);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Convention flags for the places where the closed forms admit two readings.

enum class Variant { derived, printed };
enum class I21Rule { parshin, sum };  // exp(I12 - I21) or exp(I12 + I21)

struct Conventions {
  I21Rule i21_rule = I21Rule::parshin;
  Variant case2_i21 = Variant::derived;   // sign and P2 exponent of the theta2 piece
  Variant case3_coefficient = Variant::derived;  // i2 or j2 on the (j1, j3) term
  Variant cases56 = Variant::derived;     // prefactors and P vs -P
  Variant r_exponent = Variant::derived;  // sign of m1 on R1, R2
  Variant case8 = Variant::derived;       // four-term combination
  Variant semilocal_weights = Variant::derived;

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"i21-rule",   "case2-i21", "case3-coefficient", "cases56",
                                            "r-exponent", "case8",     "semilocal-weights"};
    return n;
  }

  // name=value; throws invalid_argument for unknown names or values
  void set(const std::string& name, const std::string& value) {
    auto variant = [&](Variant& v) {
      if (value == "derived")
        v = Variant::derived;
      else if (value == "printed")
        v = Variant::printed;
      else
        throw std::invalid_argument("convention " + name + ": expected derived|printed, got " + value);
    };
    if (name == "i21-rule") {
      if (value == "parshin")
        i21_rule = I21Rule::parshin;
      else if (value == "sum")
        i21_rule = I21Rule::sum;
      else
        throw std::invalid_argument("convention i21-rule: expected parshin|sum, got " + value);
    } else if (name == "case2-i21") {
      variant(case2_i21);
    } else if (name == "case3-coefficient") {
      variant(case3_coefficient);
    } else if (name == "cases56") {
      variant(cases56);
    } else if (name == "r-exponent") {
      variant(r_exponent);
    } else if (name == "case8") {
      variant(case8);
    } else if (name == "semilocal-weights") {
      variant(semilocal_weights);
    } else {
      throw std::invalid_argument("unknown convention flag: " + name);
    }
  }

  std::vector<std::pair<std::string, std::string>> entries() const {
    auto v = [](Variant x) { return std::string(x == Variant::derived ? "derived" : "printed"); };
    return {{"i21-rule", i21_rule == I21Rule::parshin ? "parshin" : "sum"},
            {"case2-i21", v(case2_i21)},
            {"case3-coefficient", v(case3_coefficient)},
            {"cases56", v(cases56)},
            {"r-exponent", v(r_exponent)},
            {"case8", v(case8)},
            {"semilocal-weights", v(semilocal_weights)}};
  }
};

// A contribution split into the part from integrating log f1 along theta1
// and the part along theta2.
template <class R>
struct BasicSplitTerms {
  std::vector<BasicLogTerm<R>> theta1, theta2;
};
using SplitTerms = BasicSplitTerms<AlgebraElement>;

// ---------------------------------------------------------------------------
// Case 1: three binomials.

// -(i2 j3 - i3 j2) * sum over n >= 1 with n.i = n.j = 0 of a^n1 b^n2 c^n3 / n_slot.
inline AlgebraElement lattice_log_sum(const AlgebraElement& a, const AlgebraElement& b, const AlgebraElement& c,
                                      const MonomialExponents& e, int slot = 1, long bound = 0) {
  if (slot < 1 || slot > 3) throw std::invalid_argument("lattice_log_sum: slot must be 1, 2 or 3");
  const auto& desc = a.descriptor();
  KernelData k = kernel_data(e);
  AlgebraElement sum(desc);
  if (!k.positive_kernel()) return sum;
  std::array<long, 3> p{std::labs(k.m1) / k.d, std::labs(k.m2) / k.d, std::labs(k.m3) / k.d};
  AlgebraElement step = pow(a, p[0]) * pow(b, p[1]) * pow(c, p[2]);
  if (bound <= 0) {
    if (!step.in_ideal())
      throw std::invalid_argument("lattice_log_sum: unbounded sum with non-nilpotent coefficients");
    bound = desc.nilpotency_index();
  }
  AlgebraElement term = step;
  for (long n = 1; n <= bound && !term.is_zero(); ++n) {
    sum = sum + term * Rational(1, n * p[slot - 1]);
    term = term * step;
  }
  return sum * Rational(-k.m1);
}

template <class R>
std::vector<BasicLogTerm<R>> case1_terms(const R& a, const R& b, const R& c, const MonomialExponents& e) {
  using detail::rpow;
  KernelData k = kernel_data(e);
  if (!k.positive_kernel()) return {};
  R z = rpow(a, std::labs(k.m1) / k.d) * rpow(b, std::labs(k.m2) / k.d) * rpow(c, std::labs(k.m3) / k.d);
  if (detail::rzero(z)) return {};
  return {{sign_of(k.m1) * k.d, z}};
}

inline AlgebraElement log_case1(const AlgebraElement& a, const AlgebraElement& b, const AlgebraElement& c,
                                const MonomialExponents& e) {
  return log_value(case1_terms(a, b, c, e), a.descriptor());
}

// ---------------------------------------------------------------------------
// Case 2: f1 = x^i1 y^j1, f2, f3 binomials with coefficients b, c.

template <class R>
BasicSplitTerms<R> case2_terms(const R& b, const R& c, const MonomialExponents& e, const R& P1, const R& P2,
                               const Conventions& conv = {}) {
  using detail::rpow;
  BasicSplitTerms<R> out;
  long m1 = e.i(2) * e.j(3) - e.i(3) * e.j(2);
  if (m1 == 0) return out;
  long j2 = e.j(2), j3 = e.j(3), i2 = e.i(2), i3 = e.i(3);
  if (j2 * j3 < 0 && e.i(1) != 0) {
    long g = std::gcd(std::labs(j2), std::labs(j3));
    R z = rpow(b, std::labs(j3) / g) * rpow(c, std::labs(j2) / g) * rpow(P1, sign_of(j3) * m1 / g);
    if (!detail::rzero(z)) out.theta1.push_back({-sign_of(j3) * e.i(1) * g, z});
  }
  if (i2 * i3 < 0 && e.j(1) != 0) {
    long g = std::gcd(std::labs(i2), std::labs(i3));
    bool derived = conv.case2_i21 == Variant::derived;
    long pexp = (derived ? -1 : 1) * sign_of(i3) * m1 / g;
    R z = rpow(b, std::labs(i3) / g) * rpow(c, std::labs(i2) / g) * rpow(P2, pexp);
    if (!detail::rzero(z)) out.theta2.push_back({(derived ? 1 : -1) * sign_of(i3) * e.j(1) * g, z});
  }
  return out;
}

inline std::pair<AlgebraElement, AlgebraElement> log_case2(const AlgebraElement& b, const AlgebraElement& c,
                                                           const MonomialExponents& e, const AlgebraElement& P1,
                                                           const AlgebraElement& P2, const Conventions& conv = {}) {
  auto t = case2_terms(b, c, e, P1, P2, conv);
  const auto& d = b.descriptor();
  return {log_value(t.theta1, d), log_value(t.theta2, d)};
}

// ---------------------------------------------------------------------------
// Cases 3 and 4: one monomial among two binomials.
// Case 3: f1 = 1 - a X1, f2 = x^i2 y^j2, f3 = 1 - c X3.
// Case 4: f1 = 1 - a X1, f2 = 1 - c X2, f3 = x^i3 y^j3.
// The first returned term comes from the j-exponents, the second from the i-exponents.

template <class R>
struct BasicCase34Terms {
  std::optional<BasicLogTerm<R>> j_term, i_term;
  std::vector<BasicLogTerm<R>> all() const {
    std::vector<BasicLogTerm<R>> r;
    if (j_term) r.push_back(*j_term);
    if (i_term) r.push_back(*i_term);
    return r;
  }
};

template <class R>
BasicCase34Terms<R> case34_terms(const R& a, const R& other, const MonomialExponents& e, int which,
                                 const Conventions& conv = {}) {
  if (which != 3 && which != 4) throw std::invalid_argument("case34: which must be 3 or 4");
  int s = which == 3 ? 3 : 2;  // slot of the second binomial
  long i1 = e.i(1), j1 = e.j(1), is = e.i(s), js = e.j(s);
  BasicCase34Terms<R> out;
  // n1 v1 + ns vs = 0 with n1, ns >= 1 needs antiparallel vectors
  bool solvable = det2(i1, is, j1, js) == 0 && i1 * is + j1 * js < 0;
  if (!solvable) return out;
  auto term = [&](long u1, long us, long coeff) -> std::optional<BasicLogTerm<R>> {
    if (u1 == 0 || us == 0 || coeff == 0) return std::nullopt;
    long g = std::gcd(std::labs(u1), std::labs(us));
    R z = detail::rpow(a, std::labs(us) / g) * detail::rpow(other, std::labs(u1) / g);
    if (detail::rzero(z)) return std::nullopt;
    return BasicLogTerm<R>{coeff * g, z};
  };
  if (which == 3) {
    long ci = conv.case3_coefficient == Variant::derived ? e.i(2) : e.j(2);
    out.j_term = term(j1, e.j(3), -sign_of(e.j(3)) * ci);
    out.i_term = term(i1, e.i(3), sign_of(e.i(3)) * e.j(2));
  } else {
    out.i_term = term(i1, e.i(2), -sign_of(e.i(2)) * e.j(3));
    out.j_term = term(j1, e.j(2), sign_of(e.j(2)) * e.i(3));
  }
  return out;
}

inline AlgebraElement log_case34(const AlgebraElement& a, const AlgebraElement& other, const MonomialExponents& e,
                                 int which, const Conventions& conv = {}) {
  return log_value(case34_terms(a, other, e, which, conv).all(), a.descriptor());
}

// ---------------------------------------------------------------------------
// Cases 5-7: one binomial among two monomials.
// Case 5: binomial f3 (coefficient c); case 6: binomial f2; case 7: binomial f1.

template <class R>
BasicSplitTerms<R> case567_terms(const R& coef, const MonomialExponents& e, const R& P1, const R& P2, int which,
                                 const Conventions& conv = {}) {
  using detail::rpow;
  BasicSplitTerms<R> out;
  auto push = [](std::vector<BasicLogTerm<R>>& v, long coeff, const R& z) {
    if (coeff != 0 && !detail::rzero(z)) v.push_back({coeff, z});
  };
  bool printed = conv.cases56 == Variant::printed;
  R Q1 = printed ? R(-P1) : P1, Q2 = printed ? R(-P2) : P2;
  switch (which) {
    case 5: {
      long i3 = e.i(3), j3 = e.j(3);
      if (j3 == 0 && i3 != 0)
        push(out.theta1, printed ? e.i(1) * e.j(2) : -e.i(1) * e.j(2), coef * rpow(Q1, i3));
      if (i3 == 0 && j3 != 0)
        push(out.theta2, printed ? -e.i(2) * e.j(1) : e.i(2) * e.j(1), coef * rpow(Q2, j3));
      break;
    }
    case 6: {
      long i2 = e.i(2), j2 = e.j(2);
      if (j2 == 0 && i2 != 0)
        push(out.theta1, printed ? e.i(3) * e.j(1) : e.i(1) * e.j(3), coef * rpow(Q1, i2));
      if (i2 == 0 && j2 != 0)
        push(out.theta2, printed ? -e.i(1) * e.j(3) : -e.i(3) * e.j(1), coef * rpow(Q2, j2));
      break;
    }
    case 7: {
      long m1 = e.i(2) * e.j(3) - e.i(3) * e.j(2);
      long i1 = e.i(1), j1 = e.j(1);
      if (j1 == 0 && i1 != 0) push(out.theta1, -m1, coef * rpow(P1, i1));
      if (i1 == 0 && j1 != 0) push(out.theta2, -m1, coef * rpow(P2, j1));
      break;
    }
    default:
      throw std::invalid_argument("case567: which must be 5, 6 or 7");
  }
  return out;
}

inline std::pair<AlgebraElement, AlgebraElement> log_case567(const AlgebraElement& coef, const MonomialExponents& e,
                                                             const AlgebraElement& P1, const AlgebraElement& P2,
                                                             int which, const Conventions& conv = {}) {
  auto t = case567_terms(coef, e, P1, P2, which, conv);
  const auto& d = coef.descriptor();
  return {log_value(t.theta1, d), log_value(t.theta2, d)};
}

// ---------------------------------------------------------------------------
// Case 8: three monomials.

struct Case8Data {
  long A = 0;
  int S = 1;
  long twice_derived = 0;  // 2 * (torus integral over 2 pi i), segment path
  long twice_printed = 0;
};

inline Case8Data sign_case8(const MonomialExponents& e) {
  long i1 = e.i(1), i2 = e.i(2), i3 = e.i(3), j1 = e.j(1), j2 = e.j(2), j3 = e.j(3);
  Case8Data r;
  r.A = i1 * i2 * j3 + i2 * i3 * j1 + i3 * i1 * j2 - i1 * j2 * j3 - i2 * j3 * j1 - i3 * j1 * j2;
  r.S = (r.A % 2 == 0) ? 1 : -1;
  long m1 = i2 * j3 - i3 * j2;
  r.twice_derived = m1 * (i1 + j1);
  r.twice_printed = i1 * i2 * j3 + i3 * i1 * j3 - i3 * j1 * j2 - i2 * j3 * j1;
  return r;
}

// ---------------------------------------------------------------------------
// Assembled symbol.

struct FactorRecord {
  std::string kind;  // T, Q1..Q4, R1, R2
  int rotation = 0;  // 0: (f1,f2,f3), 1: (f2,f3,f1), 2: (f3,f1,f2)
  long exponent = 0;
  AlgebraElement base;  // 1 - z
  AlgebraElement value;  // base^exponent
};

struct SymbolValue2D {
  AlgebraElement total;
  AlgebraElement T;
  int S = 1;
  long A = 0;
  std::vector<FactorRecord> factors;
  Conventions conventions;
  std::vector<std::string> warnings;

  AlgebraElement product_of_factors() const {
    AlgebraElement r = T;
    for (const auto& f : factors)
      if (f.kind != "T") r = r * f.value;
    return S < 0 ? -r : r;
  }
};

namespace detail {

struct SimpleFactor {
  bool monomial = false;
  Exponent2 e;
  AlgebraElement coef;  // for binomials: 1 - coef x^i y^j
};

inline std::vector<SimpleFactor> simple_factors(const WittDecomposition2D& w) {
  std::vector<SimpleFactor> out;
  // x = t2, y = t1
  if (w.omega2 != 0 || w.omega1 != 0) out.push_back({true, {w.omega2, w.omega1}, AlgebraElement(w.descriptor())});
  for (const auto& [key, a] : w.params)
    if (!a.is_zero()) out.push_back({false, {key.first, key.second}, a});
  return out;
}

}  // namespace detail

inline SymbolValue2D cc_symbol_2d(const LaurentSeries2D& f1, const LaurentSeries2D& f2, const LaurentSeries2D& f3,
                                  const AlgebraElement& P1, const AlgebraElement& P2, int T1, int T2,
                                  const Conventions& conv = {}) {
  const auto& d = f1.descriptor();
  if (f2.descriptor() != d || f3.descriptor() != d || P1.descriptor() != d || P2.descriptor() != d)
    throw std::invalid_argument("algebra descriptor mismatch");
  if (!P1.is_unit() || !P2.is_unit()) throw std::invalid_argument("cc_symbol_2d: P1, P2 must be units");
  std::array<WittDecomposition2D, 3> w{witt_decompose_2d(f1, T1, T2), witt_decompose_2d(f2, T1, T2),
                                       witt_decompose_2d(f3, T1, T2)};
  std::array<std::vector<detail::SimpleFactor>, 3> F;
  for (int k = 0; k < 3; ++k) F[k] = detail::simple_factors(w[k]);

  SymbolValue2D out;
  out.conventions = conv;
  out.T = one(d);
  MonomialExponents nu{{Exponent2{w[0].omega2, w[0].omega1}, Exponent2{w[1].omega2, w[1].omega1},
                        Exponent2{w[2].omega2, w[2].omega1}}};
  Case8Data c8 = sign_case8(nu);
  out.A = c8.A;
  out.S = c8.S;

  auto record = [&](const std::string& kind, int rot, const LogTerm& t, long sign) {
    AlgebraElement base = Rational(1) - t.z;
    if (!base.is_unit()) throw std::domain_error("cc_symbol_2d: factor 1 - z is not a unit");
    long ex = sign * t.coeff;
    AlgebraElement v = pow(base, ex);
    if (kind == "T") out.T = out.T * v;
    out.factors.push_back({kind, rot, ex, base, v});
  };
  long i21_sign = conv.i21_rule == I21Rule::parshin ? -1 : 1;
  std::size_t degenerate = 0, non_nilpotent = 0;

  for (const auto& a : F[0])
    for (const auto& b : F[1])
      for (const auto& c : F[2]) {
        std::array<const detail::SimpleFactor*, 3> g0{&a, &b, &c};
        if (!a.monomial && !b.monomial && !c.monomial) {
          MonomialExponents e{{a.e, b.e, c.e}};
          try {
            for (const auto& t : case1_terms(a.coef, b.coef, c.coef, e)) {
              if (!t.z.in_ideal()) ++non_nilpotent;
              record("T", 0, t, 1);
            }
          } catch (const degenerate_kernel&) {
            ++degenerate;
          }
          continue;
        }
        for (int rot = 0; rot < 3; ++rot) {
          const auto& x = *g0[rot];
          const auto& y = *g0[(rot + 1) % 3];
          const auto& z = *g0[(rot + 2) % 3];
          MonomialExponents e{{x.e, y.e, z.e}};
          if (x.monomial && !y.monomial && !z.monomial) {
            auto t = case2_terms(y.coef, z.coef, e, P1, P2, conv);
            for (const auto& lt : t.theta1) record("Q1", rot, lt, 1);
            for (const auto& lt : t.theta2) record("Q2", rot, lt, i21_sign);
          } else if (!x.monomial && y.monomial && !z.monomial) {
            auto t = case34_terms(x.coef, z.coef, e, 3, conv);
            if (t.i_term) record("Q3", rot, *t.i_term, 1);
            if (t.j_term) record("Q4", rot, *t.j_term, 1);
          } else if (!x.monomial && y.monomial && z.monomial) {
            auto t = case567_terms(x.coef, e, P1, P2, 7, conv);
            bool printed = conv.r_exponent == Variant::printed;
            for (const auto& lt : t.theta1) record("R1", rot, lt, printed ? -1 : 1);
            for (const auto& lt : t.theta2) record("R2", rot, lt, printed ? -1 : i21_sign);
          }
        }
      }
  if (degenerate) out.warnings.push_back(std::to_string(degenerate) + " binomial triple(s) with degenerate kernel skipped");
  if (non_nilpotent)
    out.warnings.push_back(std::to_string(non_nilpotent) +
                           " T factor(s) with non-nilpotent argument; value depends on the truncation");
  out.total = out.product_of_factors();
  return out;
}

// ---------------------------------------------------------------------------
// Semi-local sum for f1 = 1 - a1 X1, f2 = 1 - a2 X2, f3 = 1 - a3 X3 - a4 X4.

namespace detail {

inline Rational binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return Rational(0);
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

// Weight of a^n in the semi-local sum (without the product of coefficients).
inline Rational semilocal_weight(const std::array<long, 4>& n, long D23, long D24, Variant v) {
  long n1 = n[0], n2 = n[1], n3 = n[2], n4 = n[3];
  if (n1 < 1 || n2 < 1 || n3 < 0 || n4 < 0 || n3 + n4 < 1) return Rational(0);
  if (v == Variant::derived) {
    long s = n3 + n4;
    Rational w = binom(s - 1, n3 - 1) * Rational(D23) + binom(s - 1, n4 - 1) * Rational(D24);
    return -w / Rational(n1);
  }
  Rational w(0);
  Rational c = binom(n3 + n4, n3);
  if (n3 >= 1) w -= Rational(2 * D23) * c / Rational(n1);
  if (n4 >= 1) w -= Rational(2 * D24) * c / Rational(n1);
  return w;
}

}  // namespace detail

namespace detail {

// Visits lattice points with sum i_k n_k = sum j_k n_k = 0, n1, n2 >= 1,
// n3, n4 >= 0. Two pivot columns are solved for; the other two run over
// [lower, bound]. Without an invertible pivot pair the box [lower, bound]^4 is
// searched.
template <class F>
void semilocal_enumerate(const std::array<Exponent2, 4>& e, long bound, F&& visit) {
  std::array<long, 4> lower{1, 1, 0, 0};
  int p = -1, q = -1;
  for (int s = 0; s < 4 && p < 0; ++s)
    for (int t = s + 1; t < 4; ++t)
      if (det2(e[s].i, e[t].i, e[s].j, e[t].j) != 0) {
        p = s;
        q = t;
        break;
      }
  std::array<long, 4> n{};
  if (p < 0) {
    for (n[0] = 1; n[0] <= bound; ++n[0])
      for (n[1] = 1; n[1] <= bound; ++n[1])
        for (n[2] = 0; n[2] <= bound; ++n[2])
          for (n[3] = 0; n[3] <= bound; ++n[3]) {
            long si = 0, sj = 0;
            for (int k = 0; k < 4; ++k) {
              si += e[k].i * n[k];
              sj += e[k].j * n[k];
            }
            if (si == 0 && sj == 0) visit(n);
          }
    return;
  }
  std::array<int, 2> fr{};
  for (int k = 0, c = 0; k < 4; ++k)
    if (k != p && k != q) fr[c++] = k;
  long D = det2(e[p].i, e[q].i, e[p].j, e[q].j);
  for (n[fr[0]] = lower[fr[0]]; n[fr[0]] <= bound; ++n[fr[0]])
    for (n[fr[1]] = lower[fr[1]]; n[fr[1]] <= bound; ++n[fr[1]]) {
      long ri = -(e[fr[0]].i * n[fr[0]] + e[fr[1]].i * n[fr[1]]);
      long rj = -(e[fr[0]].j * n[fr[0]] + e[fr[1]].j * n[fr[1]]);
      // Cramer for [ip iq; jp jq] (np, nq) = (ri, rj)
      long np = det2(ri, e[q].i, rj, e[q].j), nq = det2(e[p].i, ri, e[p].j, rj);
      if (np % D != 0 || nq % D != 0) continue;
      n[p] = np / D;
      n[q] = nq / D;
      if (n[p] < lower[p] || n[q] < lower[q]) continue;
      visit(n);
    }
}

}  // namespace detail

// Exact sum. With bound = 0 all coefficients must be nilpotent and the
// enumeration stops where every term vanishes.
inline AlgebraElement semilocal_log_sum(const std::array<AlgebraElement, 4>& a, const std::array<Exponent2, 4>& e,
                                        long bound = 0, Variant weights = Variant::derived) {
  const auto& desc = a[0].descriptor();
  bool all_nil = true;
  for (const auto& x : a) all_nil = all_nil && x.in_ideal();
  if (bound <= 0) {
    if (!all_nil) throw std::invalid_argument("semilocal_log_sum: non-nilpotent coefficients need an explicit bound");
    bound = desc.nilpotency_index() - 1;
  }
  long D23 = det2(e[1].i, e[2].i, e[1].j, e[2].j);
  long D24 = det2(e[1].i, e[3].i, e[1].j, e[3].j);
  AlgebraElement sum(desc);
  detail::semilocal_enumerate(e, bound, [&](const std::array<long, 4>& n) {
    Rational w = detail::semilocal_weight(n, D23, D24, weights);
    if (w == 0) return;
    AlgebraElement term = one(desc);
    for (int k = 0; k < 4 && !term.is_zero(); ++k) term = term * pow(a[k], n[k]);
    if (!term.is_zero()) sum = sum + term * w;
  });
  return sum;
}

// Truncated numerical sum, free indices up to bound.
inline cplx semilocal_log_sum(const std::array<cplx, 4>& a, const std::array<Exponent2, 4>& e, long bound,
                              Variant weights = Variant::derived) {
  if (bound <= 0) throw std::invalid_argument("semilocal_log_sum: complex coefficients need an explicit bound");
  long D23 = det2(e[1].i, e[2].i, e[1].j, e[2].j);
  long D24 = det2(e[1].i, e[3].i, e[1].j, e[3].j);
  cplx sum = 0.0;
  detail::semilocal_enumerate(e, bound, [&](const std::array<long, 4>& n) {
    Rational w = detail::semilocal_weight(n, D23, D24, weights);
    if (w == 0) return;
    cplx term = w.get_d();
    for (int k = 0; k < 4; ++k) term *= detail::rpow(a[k], n[k]);
    sum += term;
  });
  return sum;
}

}  // namespace ccsymbol
