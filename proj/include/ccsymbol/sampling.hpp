#pragma once

// Seeded instance generators: polylines and meromorphic forms for the
// iterated-integral identities, and torus-integral instances per case.
// Torus exponents are steered so each case's closed form is usually nonzero;
// coefficients keep every factor's sum |c X| at or below 0.5 on the torus.

#include "ccsymbol/iterint.hpp"
#include "ccsymbol/torusverify.hpp"

#include <algorithm>
#include <numbers>
#include <random>

namespace ccsymbol::sampling {



struct PathGen {
  std::mt19937_64 rng;
  explicit PathGen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  cplx in_disc(double r) { return std::polar(r * std::sqrt(real(0, 1)), real(0, 2 * std::numbers::pi)); }
  cplx in_annulus(double r0, double r1) { return std::polar(real(r0, r1), real(0, 2 * std::numbers::pi)); }

  // Singularities outside radius 2.5, so any path inside radius 2 is safe.
  FormSpec form() {
    if (uniform(0, 2) == 0) {
      // (c0 + c1 z) / ((z - r0)(z - r1)) dz
      cplx r0 = in_annulus(2.5, 4), r1 = in_annulus(2.5, 4);
      return FormSpec::rational({in_disc(1.5), in_disc(1.5)}, {r0 * r1, -(r0 + r1), 1.0});
    }
    std::vector<cplx> zeros, poles;
    int nz = uniform(1, 2), np = uniform(0, 2);
    for (int k = 0; k < nz; ++k) zeros.push_back(in_annulus(2.5, 4));
    for (int k = 0; k < np; ++k) poles.push_back(in_annulus(2.5, 4));
    return FormSpec::dlog(zeros, poles);
  }
  std::vector<FormSpec> forms(int n) {
    std::vector<FormSpec> r;
    for (int k = 0; k < n; ++k) r.push_back(form());
    return r;
  }

  PathSpec path(int min_vertices = 2, int max_vertices = 5) {
    PathSpec p;
    int n = uniform(min_vertices, max_vertices);
    for (int k = 0; k < n; ++k) p.vertices.push_back(in_disc(2.0));
    return p;
  }
  PathSpec path_from(cplx start, int max_vertices = 4) {
    PathSpec p{{start}};
    int n = uniform(1, max_vertices);
    for (int k = 0; k < n; ++k) p.vertices.push_back(in_disc(2.0));
    return p;
  }
};

// Loop from base around p at radius r, as a polygon with `segments` sides.
inline PathSpec loop_around(cplx base, cplx p, double r, int segments = 48) {
  cplx dir = base - p;
  double phase = std::arg(dir);
  PathSpec path{{base}};
  for (int k = 0; k <= segments; ++k) path.vertices.push_back(p + std::polar(r, phase + 2 * std::numbers::pi * k / segments));
  path.vertices.push_back(base);
  return path;
}

struct CommutatorInstance {
  PathSpec alpha, beta;
  FormSpec w1, w2;
};

inline CommutatorInstance commutator_instance(PathGen& g) {
  cplx p1 = cplx(-1.2, 0) + g.in_disc(0.2), p2 = cplx(1.2, 0) + g.in_disc(0.2);
  cplx base = cplx(0, g.real(0.3, 0.8));
  CommutatorInstance c;
  c.alpha = loop_around(base, p1, 0.5);
  c.beta = loop_around(base, p2, 0.5);
  c.w1 = FormSpec::dlog({p1, g.in_annulus(2.5, 4)});
  c.w2 = FormSpec::dlog({p2}, {g.in_annulus(2.5, 4)});
  if (g.uniform(0, 1)) std::swap(c.w1, c.w2);
  return c;
}



struct TorusGen {
  std::mt19937_64 rng;
  explicit TorusGen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  Exponent2 exponent(long span = 2) {
    Exponent2 e;
    do e = {uniform(-span, span), uniform(-span, span)};
    while (e.i == 0 && e.j == 0);
    return e;
  }
  Exponent2 nonparallel(const Exponent2& a, long span = 2) {
    Exponent2 e;
    do e = exponent(span);
    while (a.i * e.j - a.j * e.i == 0);
    return e;
  }

  // |c| eps1^i eps2^j <= cap, |c| <= cap
  cplx coefficient(const Exponent2& e, double eps1, double eps2, double cap = 0.5) {
    double r = std::pow(eps1, e.i) * std::pow(eps2, e.j);
    double m = cap * std::min(1.0, 1.0 / r) * real(0.4, 1.0);
    return std::polar(m, real(0, 2 * std::numbers::pi));
  }

  // exponents of a triple with a positive kernel: n1 e1 + n2 e2 + e3 = 0
  std::array<Exponent2, 3> positive_triple() {
    Exponent2 e1 = exponent(), e2 = nonparallel(e1);
    long n1 = uniform(1, 2), n2 = uniform(1, 2);
    Exponent2 e3{-(n1 * e1.i + n2 * e2.i), -(n1 * e1.j + n2 * e2.j)};
    std::array<Exponent2, 3> r{e1, e2, e3};
    std::shuffle(r.begin(), r.end(), rng);
    return r;
  }

  // an exponent with one coordinate zero
  Exponent2 axis(bool zero_j) {
    long v;
    do v = uniform(-2, 2);
    while (v == 0);
    return zero_j ? Exponent2{v, 0} : Exponent2{0, v};
  }

  TorusIntegrandSpec spec(const std::string& id, double eps1 = 0.1, double eps2 = 0.1) {
    TorusIntegrandSpec s;
    s.case_id = id;
    s.eps1 = eps1;
    s.eps2 = eps2;
    auto& e = s.e.e;
    bool steer = coin(0.75);
    if (id == "1") {
      if (steer) e = positive_triple();
      else {
        e[0] = exponent();
        e[1] = nonparallel(e[0]);
        e[2] = exponent();
      }
    } else if (id == "2") {
      e[0] = exponent();
      e[1] = exponent();
      e[2] = exponent();
      if (steer) {
        // j2 j3 < 0 and i2 i3 < 0
        long s2 = coin() ? 1 : -1, s3 = coin() ? 1 : -1;
        e[1] = {s2 * uniform(1, 2), s3 * uniform(1, 2)};
        e[2] = {-s2 * uniform(1, 2), -s3 * uniform(1, 2)};
      }
    } else if (id == "3" || id == "4") {
      int s = id == "3" ? 2 : 1;  // the binomial paired with f1
      e[0] = exponent();
      e[1] = exponent();
      e[2] = exponent();
      if (steer) {
        long k = uniform(1, 2), l = uniform(1, 2);
        Exponent2 v = exponent(1);
        e[0] = {k * v.i, k * v.j};
        e[s] = {-l * v.i, -l * v.j};
      }
    } else if (id == "5" || id == "6" || id == "7") {
      int slot = id == "5" ? 2 : id == "6" ? 1 : 0;
      e[0] = exponent();
      e[1] = exponent();
      e[2] = exponent();
      if (steer) e[slot] = axis(coin());
    } else if (id == "8") {
      e[0] = exponent(3);
      e[1] = exponent(3);
      e[2] = exponent(3);
    } else if (id == "semilocal") {
      if (steer) e = positive_triple();
      else {
        e[0] = exponent();
        e[1] = nonparallel(e[0]);
        e[2] = exponent();
      }
      s.e4 = exponent();
    }
    auto slots = s.monomial_slots();
    std::array<cplx*, 3> coef{&s.a, &s.b, &s.c};
    double cap = id == "semilocal" ? 0.25 : 0.5;
    for (int k = 0; k < 3; ++k)
      if (!slots[k]) *coef[k] = coefficient(e[k], eps1, eps2, cap);
    if (id == "semilocal") s.a4 = coefficient(s.e4, eps1, eps2, cap);
    return s;
  }
};

}  // namespace ccsymbol::sampling
