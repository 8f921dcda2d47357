#pragma once

// Chen iterated integrals of meromorphic 1-forms along polylines in C.
//
// A segment is cut into panels so that each panel stays well inside the disc
// of analyticity of the forms. On a panel the nested integrals are computed
// with a spectral Gauss-Legendre integration matrix; panels and segments are
// joined by the composition-of-paths rule.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ccsymbol {

using cplx = std::complex<double>;

struct PathSpec {
  std::vector<cplx> vertices;

  PathSpec reversed() const { return {{vertices.rbegin(), vertices.rend()}}; }
  cplx start() const { return vertices.front(); }
  cplx end() const { return vertices.back(); }
};

// Concatenation; b must start where a ends.
inline PathSpec concat(const PathSpec& a, const PathSpec& b) {
  if (a.vertices.empty()) return b;
  if (b.vertices.empty()) return a;
  if (std::abs(a.end() - b.start()) > 1e-12) throw std::invalid_argument("concat: paths do not meet");
  PathSpec r = a;
  r.vertices.insert(r.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
  return r;
}

// Closed polygon approximating a circle, starting and ending at center + radius.
inline PathSpec circle_path(cplx center, double radius, int segments = 64) {
  PathSpec p;
  for (int k = 0; k <= segments; ++k)
    p.vertices.push_back(center + std::polar(radius, 2 * std::numbers::pi * k / segments));
  return p;
}

struct FormSpec {
  enum class Kind { dlog, rational };
  Kind kind = Kind::dlog;
  // dlog of prod (z - zeros) / prod (z - poles), with multiplicity by repetition
  std::vector<cplx> zeros, poles;
  // num(z) / den(z) dz, coefficients from degree 0 upwards
  std::vector<cplx> num, den;

  static FormSpec dlog(std::vector<cplx> zeros, std::vector<cplx> poles = {}) {
    FormSpec f;
    f.zeros = std::move(zeros);
    f.poles = std::move(poles);
    return f;
  }
  static FormSpec rational(std::vector<cplx> num, std::vector<cplx> den) {
    FormSpec f;
    f.kind = Kind::rational;
    f.num = std::move(num);
    f.den = std::move(den);
    while (!f.den.empty() && f.den.back() == cplx(0)) f.den.pop_back();
    if (f.den.empty()) throw std::invalid_argument("FormSpec: zero denominator");
    return f;
  }

  // coefficient of dz
  cplx operator()(cplx z) const {
    if (kind == Kind::dlog) {
      cplx s = 0;
      for (auto a : zeros) s += 1.0 / (z - a);
      for (auto a : poles) s -= 1.0 / (z - a);
      return s;
    }
    auto horner = [z](const std::vector<cplx>& c) {
      cplx r = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
      return r;
    };
    return horner(num) / horner(den);
  }

  std::vector<cplx> singularities() const {
    if (kind == Kind::dlog) {
      std::vector<cplx> s = zeros;
      s.insert(s.end(), poles.begin(), poles.end());
      return s;
    }
    std::size_t n = den.size() - 1;
    if (n == 0) return {};
    // companion matrix of the monic denominator
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) C(i, i - 1) = 1;
    for (std::size_t i = 0; i < n; ++i) C(i, n - 1) = -den[i] / den[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return r;
  }

  bool is_zero() const {
    return kind == Kind::dlog ? zeros.empty() && poles.empty()
                              : std::all_of(num.begin(), num.end(), [](cplx c) { return c == cplx(0); });
  }
};

struct pole_proximity : std::domain_error {
  using std::domain_error::domain_error;
};

struct IterIntOptions {
  int quad_order = 32;
  double delta = 1e-3;        // minimum distance from path to any singularity
  double panel_ratio = 0.35;  // panel length / distance to nearest singularity
};

namespace detail {

// Gauss-Legendre rule on [-1, 1] and the matrix Q with (Q h)_i ~ int_{-1}^{x_i} h.
struct SpectralPanel {
  std::vector<double> x, w;
  std::vector<std::vector<double>> Q;
};

template <int N>
SpectralPanel make_panel() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  SpectralPanel p;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      p.x.push_back(0.0);
      p.w.push_back(wt[k]);
      continue;
    }
    p.x.push_back(a[k]);
    p.w.push_back(wt[k]);
    p.x.push_back(-a[k]);
    p.w.push_back(wt[k]);
  }
  std::vector<std::size_t> idx(p.x.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return p.x[i] < p.x[j]; });
  std::vector<double> xs, ws;
  for (auto i : idx) {
    xs.push_back(p.x[i]);
    ws.push_back(p.w[i]);
  }
  p.x = xs;
  p.w = ws;
  int n = static_cast<int>(p.x.size());
  // int_{-1}^{x} P_k = (P_{k+1}(x) - P_{k-1}(x)) / (2k + 1), and x + 1 for k = 0
  auto prim = [](int k, double t) {
    using boost::math::legendre_p;
    if (k == 0) return t + 1.0;
    return (legendre_p(k + 1, t) - legendre_p(k - 1, t)) / (2.0 * k + 1.0);
  };
  std::vector<std::vector<double>> Pk(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) Pk[k][j] = boost::math::legendre_p(k, p.x[j]);
  p.Q.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double pi = prim(k, p.x[i]) * (2.0 * k + 1.0) / 2.0;
      for (int j = 0; j < n; ++j) p.Q[i][j] += pi * p.w[j] * Pk[k][j];
    }
  return p;
}

inline const SpectralPanel& spectral_panel(int order) {
  static const std::map<int, SpectralPanel> panels{{8, make_panel<8>()},   {16, make_panel<16>()},
                                                   {24, make_panel<24>()}, {32, make_panel<32>()},
                                                   {48, make_panel<48>()}, {64, make_panel<64>()}};
  auto it = panels.find(order);
  if (it == panels.end()) throw std::invalid_argument("quadrature order must be one of 8, 16, 24, 32, 48, 64");
  return it->second;
}

inline double distance_to_segment(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::norm(d) == 0 ? 0.0 : std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// S[a][b] = simplex integral of forms a+1..b over [z0, z1], for 0 <= a <= b <= n.
using SimplexTable = std::vector<std::vector<cplx>>;

inline SimplexTable identity_table(std::size_t n) {
  SimplexTable S(n + 1, std::vector<cplx>(n + 1, 0.0));
  for (std::size_t a = 0; a <= n; ++a) S[a][a] = 1.0;
  return S;
}

// Composition of paths: integrals over the concatenation from the two tables.
inline SimplexTable compose(const SimplexTable& A, const SimplexTable& B) {
  std::size_t n = A.size() - 1;
  SimplexTable R(n + 1, std::vector<cplx>(n + 1, 0.0));
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = a; b <= n; ++b) {
      cplx s = 0;
      for (std::size_t m = a; m <= b; ++m) s += A[a][m] * B[m][b];
      R[a][b] = s;
    }
  return R;
}

inline SimplexTable panel_table(cplx z0, cplx z1, const std::vector<FormSpec>& forms, const SpectralPanel& P) {
  std::size_t n = forms.size(), q = P.x.size();
  cplx half = (z1 - z0) / 2.0, mid = (z0 + z1) / 2.0;
  // g[k][i] = omega_k(z(x_i)) dz/dx
  std::vector<std::vector<cplx>> g(n, std::vector<cplx>(q));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < q; ++i) g[k][i] = forms[k](mid + half * P.x[i]) * half;
  SimplexTable S = identity_table(n);
  for (std::size_t a = 0; a < n; ++a) {
    // F = running integral of forms a+1..b at the nodes
    std::vector<cplx> F(q, 1.0), h(q);
    for (std::size_t b = a + 1; b <= n; ++b) {
      for (std::size_t i = 0; i < q; ++i) h[i] = g[b - 1][i] * F[i];
      cplx total = 0;
      for (std::size_t i = 0; i < q; ++i) total += P.w[i] * h[i];
      S[a][b] = total;
      if (b == n) break;
      std::vector<cplx> Fn(q, 0.0);
      for (std::size_t i = 0; i < q; ++i) {
        cplx s = 0;
        for (std::size_t j = 0; j < q; ++j) s += P.Q[i][j] * h[j];
        Fn[i] = s;
      }
      F.swap(Fn);
    }
  }
  return S;
}

}  // namespace detail

// Table of all consecutive sub-word integrals along the path.
inline detail::SimplexTable iterated_integral_table(const PathSpec& path, const std::vector<FormSpec>& forms,
                                                    const IterIntOptions& opt = {}) {
  const auto& P = detail::spectral_panel(opt.quad_order);
  std::vector<cplx> sing;
  for (const auto& f : forms) {
    auto s = f.singularities();
    sing.insert(sing.end(), s.begin(), s.end());
  }
  auto table = detail::identity_table(forms.size());
  for (std::size_t s = 0; s + 1 < path.vertices.size(); ++s) {
    cplx a = path.vertices[s], b = path.vertices[s + 1];
    if (a == b) throw std::invalid_argument("iterated_integral: consecutive vertices coincide");
    for (auto p : sing)
      if (detail::distance_to_segment(p, a, b) < opt.delta)
        throw pole_proximity("iterated_integral: path passes within delta of a singularity");
    // panels: split until each is short relative to its distance to the singularities
    std::vector<std::pair<double, double>> stack{{0.0, 1.0}}, panels;
    while (!stack.empty()) {
      auto [u, v] = stack.back();
      stack.pop_back();
      cplx za = a + u * (b - a), zb = a + v * (b - a);
      double dist = 1e300;
      for (auto p : sing) dist = std::min(dist, detail::distance_to_segment(p, za, zb));
      if (std::abs(zb - za) > opt.panel_ratio * dist && v - u > 1e-9) {
        double m = (u + v) / 2;
        stack.push_back({m, v});
        stack.push_back({u, m});
      } else {
        panels.push_back({u, v});
      }
    }
    for (auto [u, v] : panels)
      table = detail::compose(table, detail::panel_table(a + u * (b - a), a + v * (b - a), forms, P));
  }
  return table;
}

inline cplx iterated_integral(const PathSpec& path, const std::vector<FormSpec>& forms,
                              const IterIntOptions& opt = {}) {
  if (forms.empty()) return 1.0;
  return iterated_integral_table(path, forms, opt)[0][forms.size()];
}

// ---------------------------------------------------------------------------
// Identity checks; each returns |LHS - RHS|.

namespace detail {

inline void shuffles(const std::vector<FormSpec>& a, const std::vector<FormSpec>& b, std::size_t i, std::size_t j,
                     std::vector<FormSpec>& cur, const std::function<void(const std::vector<FormSpec>&)>& emit) {
  if (i == a.size() && j == b.size()) {
    emit(cur);
    return;
  }
  if (i < a.size()) {
    cur.push_back(a[i]);
    shuffles(a, b, i + 1, j, cur, emit);
    cur.pop_back();
  }
  if (j < b.size()) {
    cur.push_back(b[j]);
    shuffles(a, b, i, j + 1, cur, emit);
    cur.pop_back();
  }
}

}  // namespace detail

inline double check_shuffle(const PathSpec& path, const std::vector<FormSpec>& a, const std::vector<FormSpec>& b,
                            const IterIntOptions& opt = {}) {
  cplx lhs = iterated_integral(path, a, opt) * iterated_integral(path, b, opt);
  cplx rhs = 0;
  std::vector<FormSpec> cur;
  detail::shuffles(a, b, 0, 0, cur, [&](const std::vector<FormSpec>& w) { rhs += iterated_integral(path, w, opt); });
  return std::abs(lhs - rhs);
}

inline double check_reversal(const PathSpec& path, const std::vector<FormSpec>& forms, const IterIntOptions& opt = {}) {
  std::vector<FormSpec> rev(forms.rbegin(), forms.rend());
  double sign = forms.size() % 2 ? -1.0 : 1.0;
  return std::abs(iterated_integral(path, forms, opt) - sign * iterated_integral(path.reversed(), rev, opt));
}

inline double check_composition(const PathSpec& p1, const PathSpec& p2, const std::vector<FormSpec>& forms,
                                 const IterIntOptions& opt = {}) {
  cplx lhs = iterated_integral(concat(p1, p2), forms, opt);
  cplx rhs = 0;
  for (std::size_t i = 0; i <= forms.size(); ++i) {
    std::vector<FormSpec> head(forms.begin(), forms.begin() + i), tail(forms.begin() + i, forms.end());
    rhs += iterated_integral(p1, head, opt) * iterated_integral(p2, tail, opt);
  }
  return std::abs(lhs - rhs);
}

// alpha, beta: loops at a common base point.
inline double check_commutator(const PathSpec& alpha, const PathSpec& beta, const FormSpec& w1, const FormSpec& w2,
                               const IterIntOptions& opt = {}) {
  if (std::abs(alpha.start() - alpha.end()) > 1e-12 || std::abs(beta.start() - beta.end()) > 1e-12 ||
      std::abs(alpha.start() - beta.start()) > 1e-12)
    throw std::invalid_argument("check_commutator: alpha and beta must be loops at one base point");
  PathSpec comm = concat(concat(concat(alpha, beta), alpha.reversed()), beta.reversed());
  cplx lhs = iterated_integral(comm, {w1, w2}, opt);
  cplx rhs = iterated_integral(alpha, {w1}, opt) * iterated_integral(beta, {w2}, opt) -
             iterated_integral(beta, {w1}, opt) * iterated_integral(alpha, {w2}, opt);
  return std::abs(lhs - rhs);
}

// int_0^1 theta exp(2 pi i k theta) dtheta by Gauss-Legendre panels.
inline cplx fourier_moment(int k, int quad_order = 32) {
  const auto& P = detail::spectral_panel(quad_order);
  int panels = std::max(1, std::abs(k));
  cplx s = 0;
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels, h = 1.0 / panels;
    for (std::size_t i = 0; i < P.x.size(); ++i) {
      double t = a + h * (P.x[i] + 1) / 2;
      s += P.w[i] * h / 2 * t * std::exp(cplx(0, 2 * std::numbers::pi * k * t));
    }
  }
  return s;
}

}  // namespace ccsymbol
