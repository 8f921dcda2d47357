#pragma once

// Exact arithmetic in A = Q[e1..eg]/(e1^k1, ..., eg^kg).

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccsymbol {

using Rational = mpq_class;

inline Rational frac(long n, long d) {
  Rational q(n);
  q /= d;
  return q;
}

class AlgebraDescriptor {
 public:
  AlgebraDescriptor() : AlgebraDescriptor(std::vector<int>{}) {}

  explicit AlgebraDescriptor(std::vector<int> orders) {
    for (int k : orders)
      if (k < 2) throw std::invalid_argument("generator order must be at least 2");
    auto d = std::make_shared<Data>();
    d->orders = std::move(orders);
    std::size_t g = d->orders.size();
    d->strides.assign(g, 1);
    std::size_t size = 1;
    for (std::size_t i = g; i-- > 0;) {
      d->strides[i] = size;
      size *= static_cast<std::size_t>(d->orders[i]);
    }
    d->size = size;
    d->nil_index = 1;
    for (int k : d->orders) d->nil_index += k - 1;

    d->alphas.resize(size);
    d->degree.resize(size);
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::vector<int> a(g);
      std::size_t r = idx;
      for (std::size_t i = 0; i < g; ++i) {
        a[i] = static_cast<int>(r / d->strides[i]);
        r %= d->strides[i];
      }
      d->degree[idx] = std::accumulate(a.begin(), a.end(), 0);
      d->alphas[idx] = std::move(a);
    }
    d->table.assign(size * size, -1);
    for (std::size_t x = 0; x < size; ++x)
      for (std::size_t y = 0; y < size; ++y) {
        std::size_t idx = 0;
        bool ok = true;
        for (std::size_t i = 0; i < g && ok; ++i) {
          int s = d->alphas[x][i] + d->alphas[y][i];
          if (s >= d->orders[i]) ok = false;
          idx += static_cast<std::size_t>(s) * d->strides[i];
        }
        if (ok) d->table[x * size + y] = static_cast<long>(idx);
      }
    data_ = std::move(d);
  }

  const std::vector<int>& orders() const { return data_->orders; }
  std::size_t num_generators() const { return data_->orders.size(); }
  std::size_t basis_size() const { return data_->size; }
  // Smallest K with I^K = 0.
  int nilpotency_index() const { return data_->nil_index; }
  const std::vector<int>& alpha(std::size_t idx) const { return data_->alphas[idx]; }
  int degree(std::size_t idx) const { return data_->degree[idx]; }

  std::size_t index(const std::vector<int>& alpha) const {
    if (alpha.size() != num_generators())
      throw std::invalid_argument("multi-index has wrong length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] < 0 || alpha[i] >= data_->orders[i])
        throw std::invalid_argument("multi-index exceeds generator order");
      idx += static_cast<std::size_t>(alpha[i]) * data_->strides[i];
    }
    return idx;
  }

  // Index of basis(x)*basis(y), or -1 when the product vanishes.
  long product(std::size_t x, std::size_t y) const { return data_->table[x * data_->size + y]; }

  bool operator==(const AlgebraDescriptor& o) const {
    return data_ == o.data_ || data_->orders == o.data_->orders;
  }
  bool operator!=(const AlgebraDescriptor& o) const { return !(*this == o); }

 private:
  struct Data {
    std::vector<int> orders;
    std::vector<std::size_t> strides;
    std::size_t size = 1;
    int nil_index = 1;
    std::vector<std::vector<int>> alphas;
    std::vector<int> degree;
    std::vector<long> table;
  };
  std::shared_ptr<const Data> data_;
};

inline AlgebraDescriptor algebra_new(std::vector<int> orders) {
  return AlgebraDescriptor(std::move(orders));
}

class AlgebraElement {
 public:
  AlgebraElement() : c_(1) {}
  explicit AlgebraElement(const AlgebraDescriptor& d, const Rational& constant = 0)
      : desc_(d), c_(d.basis_size()) {
    c_[0] = constant;
  }

  static AlgebraElement generator(const AlgebraDescriptor& d, std::size_t k) {
    if (k >= d.num_generators()) throw std::invalid_argument("no such generator");
    std::vector<int> a(d.num_generators(), 0);
    a[k] = 1;
    return monomial(d, a, 1);
  }
  static AlgebraElement monomial(const AlgebraDescriptor& d, const std::vector<int>& alpha,
                                 const Rational& coeff) {
    AlgebraElement r(d);
    r.c_[d.index(alpha)] = coeff;
    return r;
  }

  const AlgebraDescriptor& descriptor() const { return desc_; }
  std::size_t size() const { return c_.size(); }
  const Rational& coeff(std::size_t idx) const { return c_[idx]; }
  void set_coeff(std::size_t idx, const Rational& v) { c_[idx] = v; }
  const Rational& constant_term() const { return c_[0]; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (sgn(q) != 0) return false;
    return true;
  }
  bool is_unit() const { return sgn(c_[0]) != 0; }
  bool in_ideal() const { return sgn(c_[0]) == 0; }
  bool is_one() const {
    if (c_[0] != 1) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (sgn(c_[i]) != 0) return false;
    return true;
  }
  // Element with the nilpotent part removed.
  AlgebraElement reduced() const { return AlgebraElement(desc_, c_[0]); }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  AlgebraElement& operator*=(const Rational& q) {
    for (auto& v : c_) v *= q;
    return *this;
  }
  AlgebraElement& operator*=(const AlgebraElement& o) { return *this = *this * o; }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator-(AlgebraElement a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend AlgebraElement operator*(AlgebraElement a, const Rational& q) { return a *= q; }
  friend AlgebraElement operator*(const Rational& q, AlgebraElement a) { return a *= q; }
  friend AlgebraElement operator+(AlgebraElement a, const Rational& q) {
    a.c_[0] += q;
    return a;
  }
  friend AlgebraElement operator-(AlgebraElement a, const Rational& q) {
    a.c_[0] -= q;
    return a;
  }
  friend AlgebraElement operator-(const Rational& q, const AlgebraElement& a) { return -a + q; }

  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    a.check(b);
    AlgebraElement r(a.desc_);
    const std::size_t n = a.c_.size();
    if (n == 1) {
      r.c_[0] = a.c_[0] * b.c_[0];
      return r;
    }
    mpq_class t;
    for (std::size_t i = 0; i < n; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (sgn(b.c_[j]) == 0) continue;
        long k = a.desc_.product(i, j);
        if (k < 0) continue;
        mpq_mul(t.get_mpq_t(), a.c_[i].get_mpq_t(), b.c_[j].get_mpq_t());
        r.c_[static_cast<std::size_t>(k)] += t;
      }
    }
    return r;
  }

  bool operator==(const AlgebraElement& o) const { return desc_ == o.desc_ && c_ == o.c_; }
  bool operator!=(const AlgebraElement& o) const { return !(*this == o); }

  // Lowest total degree of a nonzero monomial, or -1 for zero.
  int order() const {
    int best = -1;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (sgn(c_[i]) != 0 && (best < 0 || desc_.degree(i) < best)) best = desc_.degree(i);
    return best;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (sgn(c_[i]) == 0) continue;
      Rational q = c_[i];
      if (!first) os << (sgn(q) < 0 ? " - " : " + ");
      else if (sgn(q) < 0) os << "-";
      first = false;
      if (sgn(q) < 0) q = -q;
      const auto& a = desc_.alpha(i);
      bool mono = i != 0;
      if (!mono || q != 1) {
        os << q.get_str();
        if (mono) os << "*";
      }
      bool firstvar = true;
      for (std::size_t g = 0; g < a.size(); ++g) {
        if (a[g] == 0) continue;
        if (!firstvar) os << "*";
        firstvar = false;
        os << "e" << (g + 1);
        if (a[g] > 1) os << "^" << a[g];
      }
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  void check(const AlgebraElement& o) const {
    if (desc_ != o.desc_) throw std::invalid_argument("algebra descriptor mismatch");
  }

  AlgebraDescriptor desc_;
  std::vector<Rational> c_;
};

inline AlgebraElement one(const AlgebraDescriptor& d) { return AlgebraElement(d, 1); }
inline AlgebraElement zero(const AlgebraDescriptor& d) { return AlgebraElement(d, 0); }

inline AlgebraElement invert(const AlgebraElement& u) {
  if (!u.is_unit()) throw std::domain_error("invert: element is not a unit");
  const auto& d = u.descriptor();
  Rational c0inv = 1 / u.constant_term();
  // u = c0 (1 + n), u^{-1} = c0^{-1} sum (-n)^k
  AlgebraElement n = u * c0inv - Rational(1);
  AlgebraElement term = one(d), sum = one(d);
  for (int k = 1; k < d.nilpotency_index(); ++k) {
    term = -(term * n);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum * c0inv;
}

inline AlgebraElement pow(const AlgebraElement& x, long e) {
  if (e < 0) return pow(invert(x), -e);
  AlgebraElement r = one(x.descriptor()), b = x;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

inline AlgebraElement log_principal(const AlgebraElement& u) {
  if (u.constant_term() != 1)
    throw std::domain_error("log_principal: constant term must be 1");
  const auto& d = u.descriptor();
  AlgebraElement n = u - Rational(1);
  AlgebraElement term = n, sum = zero(d);
  for (int k = 1; k < d.nilpotency_index() && !term.is_zero(); ++k) {
    Rational c = frac(k % 2 ? 1 : -1, k);
    sum += term * c;
    term = term * n;
  }
  return sum;
}

inline AlgebraElement exp_nil(const AlgebraElement& n) {
  if (!n.in_ideal()) throw std::domain_error("exp_nil: argument must be nilpotent");
  const auto& d = n.descriptor();
  AlgebraElement term = one(d), sum = one(d);
  for (int k = 1; k < d.nilpotency_index(); ++k) {
    term = term * n * frac(1, k);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

}  // namespace ccsymbol
