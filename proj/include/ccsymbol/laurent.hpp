#pragma once

// Truncated Laurent series over A with absolute-precision tracking.
//
// A series of precision p is known modulo t^{p+1}; kExact marks a series whose
// stored coefficients are the whole truth.  Two-variable series are series whose
// coefficients are one-variable series (outer variable t2, inner t1).

#include "ccsymbol/algebra.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ccsymbol {

// Raised when a series is not known far enough to determine the result.
struct insufficient_truncation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

constexpr int kExact = std::numeric_limits<int>::max() / 4;

// Precision arithmetic saturating at kExact.
inline int padd(long a, long b) {
  if (a >= kExact || b >= kExact) return kExact;
  long s = a + b;
  if (s >= kExact) return kExact;
  if (s <= -kExact) return -kExact;
  return static_cast<int>(s);
}

template <class C>
class Laurent;

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<AlgebraElement> {
  static AlgebraElement zero(const AlgebraDescriptor& d) { return AlgebraElement(d); }
  static AlgebraElement one(const AlgebraDescriptor& d) { return AlgebraElement(d, 1); }
  static bool exact_zero(const AlgebraElement& c) { return c.is_zero(); }
  static bool is_unit(const AlgebraElement& c) { return c.is_unit(); }
  static bool nilpotent(const AlgebraElement& c) { return c.in_ideal(); }
  static AlgebraElement scale(const AlgebraElement& c, const AlgebraElement& s) { return c * s; }
  static AlgebraElement invert(const AlgebraElement& c, std::span<const int>) {
    return ccsymbol::invert(c);
  }
  static bool agree(const AlgebraElement& a, const AlgebraElement& b, std::span<const int>) {
    return a == b;
  }
  static int inner_prec(const AlgebraElement&) { return kExact; }
  static AlgebraElement cap(const AlgebraElement& c, std::span<const int>) { return c; }
  static AlgebraElement reduced(const AlgebraElement& c) { return c.reduced(); }
  static std::string str(const AlgebraElement& c) { return c.to_string(); }
};

template <class C>
class Laurent {
  using CT = CoeffTraits<C>;

 public:
  using coeff_type = C;

  Laurent() = default;
  explicit Laurent(const AlgebraDescriptor& d, int prec = kExact) : desc_(d), prec_(prec) {}

  static Laurent monomial(const AlgebraDescriptor& d, const C& c, int n, int prec = kExact) {
    Laurent r(d, prec);
    r.set(n, c);
    return r;
  }
  static Laurent constant(const AlgebraDescriptor& d, const C& c) { return monomial(d, c, 0); }
  static Laurent one(const AlgebraDescriptor& d) { return constant(d, CT::one(d)); }

  const AlgebraDescriptor& descriptor() const { return desc_; }
  int prec() const { return prec_; }
  bool is_exact() const { return prec_ >= kExact; }
  bool empty() const { return c_.empty(); }
  // First and last stored exponent; only meaningful when !empty().
  int first() const { return low_; }
  int last() const { return low_ + static_cast<int>(c_.size()) - 1; }
  // Lower bound on the exponents of the true series.
  int low() const {
    if (!c_.empty()) return low_;
    return prec_ >= kExact ? kExact : prec_ + 1;
  }
  bool is_exact_zero() const { return c_.empty() && is_exact(); }

  C coeff(int n) const {
    if (n > prec_) throw std::out_of_range("coefficient above known precision");
    if (c_.empty() || n < low_ || n > last()) return CT::zero(desc_);
    return c_[static_cast<std::size_t>(n - low_)];
  }
  const C* find(int n) const {
    if (c_.empty() || n < low_ || n > last()) return nullptr;
    return &c_[static_cast<std::size_t>(n - low_)];
  }

  void set(int n, C v) {
    if (n > prec_) return;
    if (c_.empty()) {
      if (CT::exact_zero(v)) return;
      low_ = n;
      c_.push_back(std::move(v));
      return;
    }
    if (n < low_) {
      if (CT::exact_zero(v)) return;
      c_.insert(c_.begin(), static_cast<std::size_t>(low_ - n), CT::zero(desc_));
      low_ = n;
    } else if (n > last()) {
      if (CT::exact_zero(v)) return;
      c_.resize(static_cast<std::size_t>(n - low_ + 1), CT::zero(desc_));
    }
    c_[static_cast<std::size_t>(n - low_)] = std::move(v);
    trim();
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (!CT::exact_zero(c_[k])) f(low_ + static_cast<int>(k), c_[k]);
  }

  Laurent truncated(int p) const {
    Laurent r = *this;
    r.prec_ = std::min(prec_, p);
    r.trim();
    return r;
  }
  // Multiply by t^k.
  Laurent shifted(int k) const {
    Laurent r = *this;
    r.low_ += k;
    r.prec_ = padd(prec_, k);
    return r;
  }
  // Coefficients with exponent >= 0.
  Laurent plus_part() const {
    Laurent r(desc_, prec_);
    for_each([&](int n, const C& c) {
      if (n >= 0) r.set(n, c);
    });
    return r;
  }
  // Coefficients with exponent < 0; exact whenever the exponents up to -1 are known.
  Laurent minus_part() const {
    Laurent r(desc_, prec_ >= -1 ? kExact : prec_);
    for_each([&](int n, const C& c) {
      if (n < 0) r.set(n, c);
    });
    return r;
  }

  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

  friend Laurent operator+(const Laurent& a, const Laurent& b) { return combine(a, b, false); }
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return combine(a, b, true); }
  friend Laurent operator-(Laurent a) {
    for (auto& c : a.c_) c = -c;
    return a;
  }

  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    a.check(b);
    int prec = std::min(padd(a.prec_, b.low()), padd(b.prec_, a.low()));
    Laurent r(a.desc_, prec);
    if (a.c_.empty() || b.c_.empty()) return r;
    int lo = a.low_ + b.low_;
    int hi = std::min(a.last() + b.last(), prec);
    if (hi < lo) return r;
    std::vector<C> out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n) {
      C acc = CT::zero(a.desc_);
      int i0 = std::max(a.low_, n - b.last());
      int i1 = std::min(a.last(), n - b.low_);
      for (int i = i0; i <= i1; ++i) {
        const C& x = a.c_[static_cast<std::size_t>(i - a.low_)];
        const C& y = b.c_[static_cast<std::size_t>(n - i - b.low_)];
        if (CT::exact_zero(x) || CT::exact_zero(y)) continue;
        acc += x * y;
      }
      out.push_back(std::move(acc));
    }
    r.low_ = lo;
    r.c_ = std::move(out);
    r.trim();
    return r;
  }

  // Coefficient-wise product with a constant of the coefficient ring.
  friend Laurent operator*(const Laurent& a, const C& c) {
    Laurent r = a;
    for (auto& x : r.c_) x = x * c;
    r.trim();
    return r;
  }

  Laurent scaled(const AlgebraElement& s) const {
    Laurent r = *this;
    for (auto& x : r.c_) x = CT::scale(x, s);
    r.trim();
    return r;
  }

  // Structural equality, precision included.
  bool operator==(const Laurent& o) const {
    return desc_ == o.desc_ && prec_ == o.prec_ && low_eq(o);
  }
  bool operator!=(const Laurent& o) const { return !(*this == o); }

  // Lowest precision of any stored coefficient (kExact for scalar coefficients).
  int inner_prec() const {
    int m = kExact;
    for (const auto& c : c_) m = std::min(m, CT::inner_prec(c));
    return m;
  }

  Laurent reduced() const {
    Laurent r(desc_, prec_);
    for_each([&](int n, const C& c) { r.set(n, CT::reduced(c)); });
    return r;
  }

  std::string to_string(const std::string& var = "t") const {
    std::ostringstream os;
    bool first = true;
    for_each([&](int n, const C& c) {
      if (!first) os << " + ";
      first = false;
      os << "(" << CT::str(c) << ")";
      if (n != 0) os << "*" << var << "^" << n;
    });
    if (first) os << "0";
    if (!is_exact()) os << " + O(" << var << "^" << (prec_ + 1) << ")";
    return os.str();
  }

 private:
  friend struct CoeffTraits<Laurent<C>>;

  void check(const Laurent& o) const {
    if (desc_ != o.desc_) throw std::invalid_argument("algebra descriptor mismatch");
  }

  bool low_eq(const Laurent& o) const {
    if (c_.size() != o.c_.size()) return false;
    if (!c_.empty() && low_ != o.low_) return false;
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (c_[k] != o.c_[k]) return false;
    return true;
  }

  static Laurent combine(const Laurent& a, const Laurent& b, bool sub) {
    a.check(b);
    Laurent r(a.desc_, std::min(a.prec_, b.prec_));
    if (a.c_.empty() && b.c_.empty()) return r;
    int lo, hi;
    if (a.c_.empty()) {
      lo = b.low_;
      hi = b.last();
    } else if (b.c_.empty()) {
      lo = a.low_;
      hi = a.last();
    } else {
      lo = std::min(a.low_, b.low_);
      hi = std::max(a.last(), b.last());
    }
    hi = std::min(hi, r.prec_);
    if (hi < lo) return r;
    r.low_ = lo;
    r.c_.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n) {
      const C* x = a.find(n);
      const C* y = b.find(n);
      if (x && y)
        r.c_.push_back(sub ? *x - *y : *x + *y);
      else if (x)
        r.c_.push_back(*x);
      else if (y)
        r.c_.push_back(sub ? -*y : *y);
      else
        r.c_.push_back(CT::zero(a.desc_));
    }
    r.trim();
    return r;
  }

  void trim() {
    while (!c_.empty() && last() > prec_) c_.pop_back();
    while (!c_.empty() && CT::exact_zero(c_.back())) c_.pop_back();
    std::size_t k = 0;
    while (k < c_.size() && CT::exact_zero(c_[k])) ++k;
    if (k > 0) {
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(k));
      low_ += static_cast<int>(k);
    }
  }

  AlgebraDescriptor desc_;
  int low_ = 0;
  std::vector<C> c_;
  int prec_ = kExact;
};

using LaurentSeries1D = Laurent<AlgebraElement>;
using LaurentSeries2D = Laurent<LaurentSeries1D>;

// Index of the first coefficient that is a unit, provided every coefficient
// below it is nilpotent.
template <class C>
std::optional<int> leading_unit_index(const Laurent<C>& f) {
  std::optional<int> w;
  f.for_each([&](int n, const C& c) {
    if (!w && CoeffTraits<C>::is_unit(c)) w = n;
  });
  return w;
}

template <class C>
struct CoeffTraits<Laurent<C>> {
  using S = Laurent<C>;
  static S zero(const AlgebraDescriptor& d) { return S(d); }
  static S one(const AlgebraDescriptor& d) { return S::one(d); }
  static bool exact_zero(const S& c) { return c.is_exact_zero(); }
  static bool is_unit(const S& c) { return leading_unit_index(c).has_value(); }
  static bool nilpotent(const S& c) {
    bool ok = true;
    c.for_each([&](int, const C& x) { ok = ok && CoeffTraits<C>::nilpotent(x); });
    return ok;
  }
  static S scale(const S& c, const AlgebraElement& s) { return c.scaled(s); }
  static S invert(const S& c, std::span<const int> caps);
  static bool agree(const S& a, const S& b, std::span<const int> caps);
  static int inner_prec(const S& c) { return c.prec(); }
  static S cap(const S& c, std::span<const int> caps);
  static S reduced(const S& c) { return c.reduced(); }
  static std::string str(const S& c) { return c.to_string("t1"); }
};

inline std::optional<int> gamma_valuation(const LaurentSeries1D& f) {
  return leading_unit_index(f);
}

struct Valuation2D {
  int omega1 = 0;
  int omega2 = 0;
  bool operator==(const Valuation2D&) const = default;
};

inline std::optional<Valuation2D> gamma_valuation_2d(const LaurentSeries2D& f) {
  auto w2 = leading_unit_index(f);
  if (!w2) return std::nullopt;
  auto w1 = gamma_valuation(f.coeff(*w2));
  return Valuation2D{*w1, *w2};
}


// Power-series inverse of f (support >= 0, unit constant term) modulo t^{P+1}.
template <class C>
Laurent<C> psinv(const Laurent<C>& f, int P, std::span<const int> inner_caps) {
  using CT = CoeffTraits<C>;
  const auto& d = f.descriptor();
  if (f.empty() || f.first() != 0 || !CT::is_unit(f.coeff(0)))
    throw std::domain_error("power series inverse needs a unit constant term");
  C u0 = CT::invert(f.coeff(0), inner_caps);
  if (f.is_exact() && f.last() == 0) return Laurent<C>::constant(d, u0);
  P = std::min(P, f.prec());
  if (P >= kExact)
    throw std::invalid_argument("inverse is an infinite series; a truncation is required");
  if (P < 0) return Laurent<C>(d, P);
  std::vector<C> u;
  u.reserve(static_cast<std::size_t>(P + 1));
  u.push_back(u0);
  for (int n = 1; n <= P; ++n) {
    C acc = CT::zero(d);
    int kmax = std::min(n, f.last());
    for (int k = 1; k <= kmax; ++k) {
      const C* fk = f.find(k);
      if (!fk || CT::exact_zero(*fk)) continue;
      acc += *fk * u[static_cast<std::size_t>(n - k)];
    }
    u.push_back(-(u0 * acc));
  }
  Laurent<C> r(d, P);
  for (int n = 0; n <= P; ++n) r.set(n, u[static_cast<std::size_t>(n)]);
  return r;
}

// sum_{n<K} (-s)^n for a series whose coefficients all lie in I.
template <class C>
Laurent<C> nilpotent_geometric(const Laurent<C>& s) {
  const auto& d = s.descriptor();
  Laurent<C> sum = Laurent<C>::one(d), term = Laurent<C>::one(d);
  Laurent<C> ms = -s;
  for (int n = 1; n < d.nilpotency_index(); ++n) {
    term = term * ms;
    if (term.is_exact_zero()) break;
    sum += term;
  }
  return sum;
}

// Inverse of a Gamma-element.  caps[0] bounds the result precision in this
// variable; caps[1..] are handed to the coefficient inverses.
template <class C>
Laurent<C> invert(const Laurent<C>& f, std::span<const int> caps) {
  using CT = CoeffTraits<C>;
  auto w = leading_unit_index(f);
  if (!w) throw std::domain_error("series is not in Gamma(A, I)");
  const auto& d = f.descriptor();
  std::span<const int> inner = caps.size() > 1 ? caps.subspan(1) : std::span<const int>{};
  int cap = caps.empty() ? kExact : caps[0];
  C ainv = CT::invert(f.coeff(*w), inner);
  Laurent<C> F = (f * ainv).shifted(-*w);
  Laurent<C> Fp = F.plus_part(), Fm = F.minus_part();
  int L = Fm.empty() ? 0 : -Fm.first();
  int K = d.nilpotency_index();
  int P = padd(cap, static_cast<long>(*w) + static_cast<long>(K - 1) * L + 1);
  Laurent<C> u = psinv(Fp, P, inner);
  Laurent<C> r = u;
  if (!Fm.empty()) r = u * nilpotent_geometric(u * Fm);
  return (r * ainv).shifted(-*w).truncated(cap);
}

inline LaurentSeries1D invert(const LaurentSeries1D& f, int cap = kExact) {
  int caps[1] = {cap};
  return invert(f, std::span<const int>(caps, 1));
}

template <class C>
Laurent<C> CoeffTraits<Laurent<C>>::invert(const S& c, std::span<const int> caps) {
  return ccsymbol::invert(c, caps);
}

template <class C>
Laurent<C> CoeffTraits<Laurent<C>>::cap(const S& c, std::span<const int> caps) {
  if (caps.empty()) return c;
  S r(c.descriptor(), std::min(c.prec(), caps[0]));
  auto inner = caps.subspan(1);
  c.for_each([&](int n, const C& x) {
    if (n <= caps[0]) r.set(n, CoeffTraits<C>::cap(x, inner));
  });
  return r;
}

// a and b agree at every exponent up to caps[0] (recursively for coefficients).
// False when either side is not known that far.
template <class C>
bool agree_upto(const Laurent<C>& a, const Laurent<C>& b, std::span<const int> caps) {
  if (caps.empty()) return a == b;
  int n = caps[0];
  if (a.prec() < n || b.prec() < n) return false;
  if (a.empty() && b.empty()) return true;
  int lo = std::min(a.low(), b.low());
  int hi = std::min(n, std::max(a.empty() ? lo : a.last(), b.empty() ? lo : b.last()));
  auto inner = caps.subspan(1);
  for (int k = lo; k <= hi; ++k) {
    const C* x = a.find(k);
    const C* y = b.find(k);
    C zx = x ? *x : CoeffTraits<C>::zero(a.descriptor());
    C zy = y ? *y : CoeffTraits<C>::zero(a.descriptor());
    if (!CoeffTraits<C>::agree(zx, zy, inner)) return false;
  }
  return true;
}

template <class C>
bool CoeffTraits<Laurent<C>>::agree(const S& a, const S& b, std::span<const int> caps) {
  return agree_upto(a, b, caps);
}

inline bool agree_upto(const LaurentSeries1D& a, const LaurentSeries1D& b, int n) {
  int caps[1] = {n};
  return agree_upto(a, b, std::span<const int>(caps, 1));
}
inline bool agree_upto(const LaurentSeries2D& a, const LaurentSeries2D& b, int n1, int n2) {
  int caps[2] = {n2, n1};
  return agree_upto(a, b, std::span<const int>(caps, 2));
}

// 2D helpers.  T1 is the inner (t1) truncation, T2 the outer one.

inline LaurentSeries2D cap_2d(const LaurentSeries2D& f, int T1, int T2) {
  int caps[2] = {T2, T1};
  return CoeffTraits<LaurentSeries2D>::cap(f, std::span<const int>(caps, 2));
}

// Inverse of a 2D Gamma-element, raising the working inner precision until
// every level is known to t1^{T1}.
inline LaurentSeries2D invert_2d(const LaurentSeries2D& f, int T1, int T2) {
  int W = T1 + 2;
  for (int attempt = 0; attempt < 8; ++attempt) {
    int caps[2] = {T2, W};
    LaurentSeries2D r = invert(f, std::span<const int>(caps, 2));
    int m = r.inner_prec();
    if (m >= T1) return cap_2d(r, T1, T2);
    if (f.inner_prec() < kExact && attempt > 0) return r;
    W += (T1 - m) + 2;
  }
  throw std::runtime_error("invert_2d: inner precision did not converge");
}

inline LaurentSeries2D lift_1d(const LaurentSeries1D& g, int level = 0) {
  return LaurentSeries2D::monomial(g.descriptor(), g, level);
}

// Monomial c * t1^j * t2^i.
inline LaurentSeries2D monomial_2d(const AlgebraElement& c, int j, int i) {
  const auto& d = c.descriptor();
  return LaurentSeries2D::monomial(d, LaurentSeries1D::monomial(d, c, j), i);
}

inline LaurentSeries1D monomial_1d(const AlgebraElement& c, int n) {
  return LaurentSeries1D::monomial(c.descriptor(), c, n);
}

// ---------------------------------------------------------------------------
// Local expansions of factored rational functions on P^1.

struct ProjectivePoint {
  bool infinity = false;
  Rational x;
  static ProjectivePoint at(const Rational& c) { return {false, c}; }
  static ProjectivePoint inf() { return {true, 0}; }
  bool operator==(const ProjectivePoint& o) const {
    return infinity == o.infinity && (infinity || x == o.x);
  }
  bool operator<(const ProjectivePoint& o) const {
    if (infinity != o.infinity) return !infinity;
    return !infinity && x < o.x;
  }
};

struct RootFactor {
  AlgebraElement root;
  int multiplicity = 1;
};

// f = leading * prod (t - root)^multiplicity.
struct FactoredRational {
  AlgebraElement leading;
  std::vector<RootFactor> roots;
};

inline void check_transverse(const FactoredRational& f) {
  for (std::size_t a = 0; a < f.roots.size(); ++a)
    for (std::size_t b = a + 1; b < f.roots.size(); ++b)
      if (f.roots[a].root.constant_term() == f.roots[b].root.constant_term())
        throw std::invalid_argument("two roots share a constant part");
}

// Expansion of (t - alpha)^m in the uniformizer at p, modulo u^{T+1}.
inline LaurentSeries1D local_factor(const AlgebraElement& alpha, int m, const ProjectivePoint& p,
                                    int T) {
  const auto& d = alpha.descriptor();
  LaurentSeries1D base(d);
  if (p.infinity) {
    // t - alpha = u^{-1} (1 - alpha u)
    base.set(-1, one(d));
    base.set(0, -alpha);
  } else {
    // t - alpha = u - (alpha - c)
    base.set(1, one(d));
    base.set(0, p.x - alpha);
  }
  if (m >= 0) {
    LaurentSeries1D r = LaurentSeries1D::one(d);
    for (int k = 0; k < m; ++k) r = r * base;
    return r.truncated(T);
  }
  LaurentSeries1D inv = invert(base, T);
  LaurentSeries1D r = LaurentSeries1D::one(d);
  for (int k = 0; k < -m; ++k) r = r * inv;
  return r.truncated(T);
}

inline LaurentSeries1D local_expansion(const FactoredRational& f, const ProjectivePoint& p, int T) {
  check_transverse(f);
  const auto& d = f.leading.descriptor();
  if (!f.leading.is_unit()) throw std::invalid_argument("leading coefficient must be a unit");
  // Work with extra precision so the product is still known to u^T.
  int slack = 0;
  for (const auto& r : f.roots) slack += std::abs(r.multiplicity);
  int W = T + slack + d.nilpotency_index() * (slack + 1);
  LaurentSeries1D r = LaurentSeries1D::constant(d, f.leading);
  for (const auto& rf : f.roots) r = r * local_factor(rf.root, rf.multiplicity, p, W);
  if (r.prec() < T) throw std::runtime_error("local_expansion: precision loss");
  return r.truncated(T);
}

}  // namespace ccsymbol
