// Acceptance run: one PASS/FAIL line per criterion.
//
// usage: acceptance [path/to/ccsymbol [examples/cli]]
// The CLI path is needed for the determinism check; without it that line fails.

#include "ccsymbol/iterint.hpp"
#include "ccsymbol/sampling.hpp"
#include "ccsymbol/symbol1d.hpp"
#include "ccsymbol/symbol2d.hpp"
#include "ccsymbol/torusverify.hpp"
#include "ccsymbol/witt.hpp"
#include "support.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace ccsymbol;
using testsupport::Gen;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

// ---------------------------------------------------------------------------

Outcome witt_1d() {
  Outcome o;
  Gen g(1001);
  for (int it = 0; it < 200; ++it) {
    auto d = g.algebra(2, 4);
    int T = g.uniform(1, 12);
    auto w = g.witt_1d(d, T);
    auto f = testsupport::expand_1d(w);
    auto dec = witt_decompose_1d(f, T);
    bool params = dec.omega == w.omega && dec.leading == w.leading && dec.minus_params == w.minus_params &&
                  dec.plus_trunc >= T;
    for (int i = 1; i <= T && params; ++i) params = dec.plus(i) == w.plus(i);
    o.require(params, "parameter mismatch at instance " + std::to_string(it));
    o.require(agree_upto(reconstruct_1d(dec, T), f, w.omega + T), "reconstruction mismatch at " + std::to_string(it));
  }
  o.detail = o.pass ? "200 instances" : o.detail;
  return o;
}

Outcome witt_2d() {
  Outcome o;
  Gen g(1002);
  constexpr int T = 8;
  int negative = 0;
  for (int it = 0; it < 50; ++it) {
    auto d = g.algebra(2, 3);
    auto w = g.witt_2d(d, 5);
    auto f = testsupport::expand_2d(w);
    auto dec = witt_decompose_2d(f, T, T);
    o.require(dec.omega1 == w.omega1 && dec.omega2 == w.omega2 && dec.leading == w.leading,
              "leading data mismatch at " + std::to_string(it));
    for (const auto& [key, a] : dec.params)
      if (key.first < 0) {
        ++negative;
        o.require(a.in_ideal(), "i<0 parameter outside I at " + std::to_string(it));
      }
    for (const auto& [key, a] : w.params) {
      auto rt = dec.row_trunc.find(key.first);
      bool covered = rt != dec.row_trunc.end();
      o.require(covered, "row missing at " + std::to_string(it));
      if (covered && key.first <= T && key.second <= rt->second)
        o.require(dec.param(key.first, key.second) == a, "parameter mismatch at " + std::to_string(it));
    }
    o.require(agree_upto(reconstruct_2d(dec, T, T), f, w.omega1 + T, w.omega2 + T),
              "reconstruction mismatch at " + std::to_string(it));
  }
  if (o.pass) o.detail = "50 instances, " + std::to_string(negative) + " i<0 params in I";
  return o;
}

Outcome symbol_1d() {
  Outcome o;
  Gen g(1003);
  int steinberg = 0;
  for (int it = 0; it < 100; ++it) {
    auto d = g.algebra(2, 3);
    auto f = testsupport::random_gamma(g, d), h = testsupport::random_gamma(g, d), k = testsupport::random_gamma(g, d);
    o.require((cc_symbol_1d(f, h).value * cc_symbol_1d(h, f).value).is_one(), "antisymmetry");
    o.require(cc_symbol_1d(f * k, h).value == cc_symbol_1d(f, h).value * cc_symbol_1d(k, h).value, "bimultiplicativity");
    o.require(cc_symbol_1d(h, f * k).value == cc_symbol_1d(h, f).value * cc_symbol_1d(h, k).value, "bimultiplicativity");
  }
  for (int it = 0; steinberg < 100 && it < 1000; ++it) {
    auto d = g.algebra(2, 3);
    auto f = testsupport::random_gamma(g, d);
    if (!gamma_valuation(LaurentSeries1D::one(d) - f)) continue;
    o.require(steinberg_check(f).value.is_one(), "Steinberg");
    ++steinberg;
  }
  o.require(steinberg == 100, "too few Steinberg instances");
  auto Q = AlgebraDescriptor();
  for (int it = 0; it < 100; ++it) {
    auto f = testsupport::random_gamma(g, Q), h = testsupport::random_gamma(g, Q);
    o.require(cc_symbol_1d(f, h).value == tame_symbol(f, h), "tame specialization");
  }
  if (o.pass) o.detail = "100 instances per property";
  return o;
}

Outcome weil() {
  Outcome o;
  Gen g(1004);
  for (int it = 0; it < 50; ++it) {
    auto d = g.algebra(2, 3);
    auto f = testsupport::random_rational(g, d, 4, 1), h = testsupport::random_rational(g, d, 4, 1);
    o.require(weil_product(f, h).is_one(), "product != 1 at " + std::to_string(it));
  }
  if (o.pass) o.detail = "50 factored pairs";
  return o;
}

Outcome case1_exact() {
  Outcome o;
  Gen g(1005);
  long checked = 0, nonzero = 0;
  for (const auto& d : {algebra_new({4}), algebra_new({2, 2})}) {
    auto a = g.nilpotent(d, 1.0), b = g.nilpotent(d, 1.0), c = g.nilpotent(d, 1.0);
    constexpr long S = 4;
    for (long i1 = -S; i1 <= S; ++i1)
      for (long j1 = -S; j1 <= S; ++j1)
        for (long i2 = -S; i2 <= S; ++i2)
          for (long j2 = -S; j2 <= S; ++j2)
            for (long i3 = -S; i3 <= S; ++i3)
              for (long j3 = -S; j3 <= S; ++j3) {
                MonomialExponents e{{Exponent2{i1, j1}, Exponent2{i2, j2}, Exponent2{i3, j3}}};
                if (i2 * j3 - i3 * j2 == 0 && i3 * j1 - i1 * j3 == 0 && i1 * j2 - i2 * j1 == 0) continue;
                auto x = log_case1(a, b, c, e);
                auto y = lattice_log_sum(a, b, c, e);
                if (!(x == y)) {
                  o.require(false, "mismatch");
                  return o;
                }
                ++checked;
                nonzero += !x.is_zero();
              }
  }
  o.detail = std::to_string(checked) + " triples, " + std::to_string(nonzero) + " nonzero";
  return o;
}

Outcome case1_numeric() {
  Outcome o;
  sampling::TorusGen g(1006);
  double worst = 0;
  for (int it = 0; it < 20; ++it) {
    auto s = g.spec("1", 0.1, 0.1);
    o.require(std::abs(s.a) <= 0.5 && std::abs(s.b) <= 0.5 && std::abs(s.c) <= 0.5, "coefficient above 0.5");
    auto r = verify_case(s, 128, 1e-6);
    worst = std::max(worst, r.best_residual);
    o.require(r.pass, "draw " + std::to_string(it) + " residual " + fmt(r.best_residual));
  }
  if (o.pass) o.detail = "20 draws, max residual " + fmt(worst);
  return o;
}

Outcome cases_2_to_7() {
  Outcome o;
  std::ostringstream flags;
  double worst = 0, worst_vanishing = 0;
  for (std::string id : {"2", "3", "4", "5", "6", "7"}) {
    sampling::TorusGen g(1007 + std::stoi(id));
    std::map<std::string, int> chosen;
    for (int it = 0; it < 20; ++it) {
      double e1 = it % 2 ? 0.1 : g.real(0.3, 0.8), e2 = it % 2 ? 0.1 : g.real(0.3, 0.8);
      CaseReport r;
      try {
        r = verify_case(g.spec(id, e1, e2), 128, 1e-6);
      } catch (const degenerate_kernel&) {
        continue;
      }
      ++chosen[r.best];
      worst = std::max(worst, r.best_residual);
      o.require(r.pass, "case " + id + " residual " + fmt(r.best_residual));
      for (const auto& out : r.outcomes)
        if (out.value == r.best)
          for (const auto& c : out.comparisons)
            if (c.vanishing) worst_vanishing = std::max(worst_vanishing, c.residual);
    }
    flags << " " << id << ":";
    bool first = true;
    for (const auto& [v, n] : chosen) {
      flags << (first ? "" : "/") << (v == "-" ? "no-flag" : v) << "x" << n;
      first = false;
    }
  }
  // Case 7 with j1 != 0: the theta1 primitive vanishes.
  sampling::TorusGen g7(1015);
  int off_axis = 0;
  for (int it = 0; it < 40; ++it) {
    auto s = g7.spec("7", 0.5, 0.5);
    if (s.e.j(1) == 0) continue;
    ++off_axis;
    worst_vanishing = std::max(worst_vanishing, std::abs(torus_moments(s).theta1));
  }
  // Mixed-sign kernels: the Case 1 integral vanishes.
  sampling::TorusGen g1(1016);
  int mixed = 0;
  for (int it = 0; mixed < 20 && it < 2000; ++it) {
    auto s = g1.spec("1", 0.5, 0.5);
    auto k = kernel_data(s.e);
    if ((k.m1 > 0 && k.m2 > 0 && k.m3 > 0) || (k.m1 < 0 && k.m2 < 0 && k.m3 < 0)) continue;
    ++mixed;
    worst_vanishing = std::max(worst_vanishing, std::abs(torus_integral(s)));
  }
  o.require(off_axis >= 5 && mixed >= 5, "too few vanishing instances");
  o.require(worst_vanishing <= 1e-8, "vanishing residual " + fmt(worst_vanishing));
  if (o.pass)
    o.detail = "max residual " + fmt(worst) + ", vanishing max " + fmt(worst_vanishing) + ", best flags" + flags.str();
  return o;
}

long independent_A(const MonomialExponents& e) {
  long A = 0;
  for (int k = 1; k <= 3; ++k) {
    int k1 = k % 3 + 1, k2 = (k + 1) % 3 + 1;
    A += e.i(k) * e.i(k1) * e.j(k2) - e.i(k) * e.j(k1) * e.j(k2);
  }
  return A;
}

Outcome case8() {
  Outcome o;
  sampling::TorusGen tg(1017);
  double worst = 0;
  for (int it = 0; it < 20; ++it) {
    auto s = tg.spec("8", tg.real(0.1, 0.9), tg.real(0.1, 0.9));
    auto c8 = sign_case8(s.e);
    cplx v = torus_integral(s) / cplx(0, 2 * std::numbers::pi);
    double res = std::abs(v - c8.twice_derived / 2.0);
    worst = std::max(worst, res);
    o.require(res <= 1e-8, "case 8 residual " + fmt(res));
  }
  Gen g(1018);
  for (int it = 0; it < 1000; ++it) {
    MonomialExponents e;
    for (auto& x : e.e) x = {g.uniform(-6, 6), g.uniform(-6, 6)};
    o.require(sign_case8(e).A == independent_A(e), "A mismatch");
  }
  auto d = algebra_new({2});
  for (int it = 0; it < 100; ++it) {
    MonomialExponents e;
    for (auto& x : e.e) x = {g.uniform(-3, 3), g.uniform(-3, 3)};
    long A = independent_A(e);
    std::vector<LaurentSeries2D> f;
    for (int k = 0; k < 3; ++k) f.push_back(monomial_2d(one(d), static_cast<int>(e.j(k + 1)), static_cast<int>(e.i(k + 1))));
    auto v = cc_symbol_2d(f[0], f[1], f[2], one(d), one(d), 2, 2);
    o.require(v.total == AlgebraElement(d, Rational(A % 2 == 0 ? 1 : -1)), "monomial symbol != (-1)^A");
  }
  if (o.pass) o.detail = "numeric max " + fmt(worst) + ", 1000 A checks, 100 monomial symbols";
  return o;
}

Outcome iterint() {
  Outcome o;
  sampling::PathGen g(1019);
  std::array<double, 4> worst{};
  for (int it = 0; it < 50; ++it) {
    int m = g.uniform(1, 2), n = g.uniform(1, 4 - m);
    auto p = g.path();
    auto a = g.forms(m), b = g.forms(n);
    worst[0] = std::max(worst[0], check_shuffle(p, a, b));
    auto q = g.path();
    worst[1] = std::max(worst[1], check_reversal(q, g.forms(g.uniform(1, 3))));
    auto p1 = g.path();
    auto p2 = g.path_from(p1.end());
    worst[2] = std::max(worst[2], check_composition(p1, p2, g.forms(g.uniform(1, 3))));
    auto c = sampling::commutator_instance(g);
    worst[3] = std::max(worst[3], check_commutator(c.alpha, c.beta, c.w1, c.w2));
  }
  const char* names[] = {"shuffle", "reversal", "composition", "commutator"};
  for (int k = 0; k < 4; ++k) o.require(worst[k] <= 1e-8, std::string(names[k]) + " residual " + fmt(worst[k]));
  double mom = 0;
  for (int k = -8; k <= 8; ++k)
    if (k != 0) mom = std::max(mom, std::abs(fourier_moment(k) - 1.0 / cplx(0, 2 * std::numbers::pi * k)));
  o.require(mom <= 1e-10, "moment residual " + fmt(mom));
  if (o.pass)
    o.detail = "max residuals " + fmt(worst[0]) + "/" + fmt(worst[1]) + "/" + fmt(worst[2]) + "/" + fmt(worst[3]) +
               ", moments " + fmt(mom);
  return o;
}

// Constant Fourier mode of log(1 - a1 X1) * dlog(1 - a2 X2) ^ dlog(1 - a3 X3 - a4 X4),
// each factor expanded by power series with every exponent at most B.
AlgebraElement brute_semilocal(const std::array<AlgebraElement, 4>& a, const std::array<Exponent2, 4>& e, long B) {
  const auto& d = a[0].descriptor();
  // -log(1 - u - v) = sum_s (u + v)^s / s, kept as coefficients of a3^n3 a4^n4
  std::map<std::pair<long, long>, Rational> poly{{{0, 0}, Rational(1)}}, log34;
  for (long s = 1; s <= 2 * B; ++s) {
    std::map<std::pair<long, long>, Rational> next;
    for (const auto& [k, c] : poly) {
      next[{k.first + 1, k.second}] += c;
      next[{k.first, k.second + 1}] += c;
    }
    poly = next;
    for (const auto& [k, c] : poly)
      if (k.first <= B && k.second <= B) log34[k] -= c / Rational(s);
  }
  long D23 = e[1].i * e[2].j - e[2].i * e[1].j, D24 = e[1].i * e[3].j - e[3].i * e[1].j;
  AlgebraElement sum(d);
  for (long n1 = 1; n1 <= B; ++n1)
    for (long n2 = 1; n2 <= B; ++n2)
      for (const auto& [k, c] : log34) {
        auto [n3, n4] = k;
        if (n1 * e[0].i + n2 * e[1].i + n3 * e[2].i + n4 * e[3].i != 0) continue;
        if (n1 * e[0].j + n2 * e[1].j + n3 * e[2].j + n4 * e[3].j != 0) continue;
        // log(1 - a1 X1) -> -a1^n1 / n1; dlog(1 - a2 X2) -> -a2^n2 along e2; dlog of log34 -> c along n3 e3 + n4 e4
        Rational w = -Rational(1, n1) * -Rational(1) * c * Rational(n3 * D23 + n4 * D24);
        sum = sum + pow(a[0], n1) * pow(a[1], n2) * pow(a[2], n3) * pow(a[3], n4) * w;
      }
  return sum;
}

Outcome semilocal() {
  Outcome o;
  Gen g(1020);
  int nonzero = 0;
  for (int it = 0; it < 20; ++it) {
    std::vector<int> orders{g.uniform(3, 5)};
    if (g.coin()) orders.push_back(2);
    AlgebraDescriptor d(orders);
    std::array<AlgebraElement, 4> a;
    for (auto& x : a) x = g.nilpotent(d, 0.9);
    std::array<Exponent2, 4> e;
    for (auto& x : e) x = {g.uniform(-2, 2), g.uniform(-2, 2)};
    if (it % 4 != 3) {
      e[2] = {-(e[0].i + e[1].i), -(e[0].j + e[1].j)};
      if (it % 2) e[3] = e[2];
    }
    auto s = semilocal_log_sum(a, e);
    o.require(s == brute_semilocal(a, e, 6), "mismatch at " + std::to_string(it));
    nonzero += !s.is_zero();
    std::array<AlgebraElement, 4> a0{a[0], a[1], a[2], AlgebraElement(d)};
    MonomialExponents e3{{e[0], e[1], e[2]}};
    bool degenerate = false;
    try {
      kernel_data(e3);
    } catch (const degenerate_kernel&) {
      degenerate = true;
    }
    if (!degenerate) o.require(semilocal_log_sum(a0, e) == log_case1(a[0], a[1], a[2], e3), "a4 = 0 degeneration");
  }
  if (o.pass) o.detail = "20 instances, " + std::to_string(nonzero) + " nonzero";
  return o;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return out + "\n<exit " + std::to_string(status) + ">";
}

Outcome determinism(const std::string& exe, const std::string& examples) {
  Outcome o;
  if (exe.empty()) {
    o.require(false, "no CLI path given");
    return o;
  }
  std::vector<std::string> jobs{"decompose1d -i " + examples + "/decompose1d_t_one_minus_t.json",
                                "decompose2d -i " + examples + "/decompose2d_example.json",
                                "symbol1d -i " + examples + "/symbol1d_nilpotent.json",
                                "symbol2d -i " + examples + "/symbol2d_example.json",
                                "weil -i " + examples + "/weil_example.json",
                                "verify-cases --draws 2",
                                "verify-iterint --count 10"};
  for (const auto& job : jobs) {
    std::string base = capture(exe + " " + job + " 2>&1");
    for (const char* env : {"CC_SYMBOL_THREADS=1 ", "CC_SYMBOL_THREADS=4 ", ""})
      o.require(capture(std::string(env) + exe + " " + job + " 2>&1") == base, "output differs: " + job);
    o.require(base.find("<exit 0>") != std::string::npos, "non-zero exit: " + job);
  }
  if (o.pass) o.detail = std::to_string(jobs.size()) + " commands x 4 runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string exe = argc > 1 ? argv[1] : "";
  std::string examples = argc > 2 ? argv[2] : "examples/cli";
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "Witt 1D roundtrip", 5, witt_1d},
      {2, "Witt 2D roundtrip", 30, witt_2d},
      {3, "1D symbol properties", 0, symbol_1d},
      {4, "Weil reciprocity on P1", 0, weil},
      {5, "Case 1 exact oracle", 0, case1_exact},
      {6, "Case 1 numeric", 10, case1_numeric},
      {7, "Cases 2-7 numeric", 0, cases_2_to_7},
      {8, "Case 8 and Parshin sign", 0, case8},
      {9, "Iterated-integral identities", 0, iterint},
      {10, "Semi-local sum", 0, semilocal},
      {11, "CLI determinism", 0, [&] { return determinism(exe, examples); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0) o.require(secs < c.limit, "runtime " + fmt(secs) + " s over " + fmt(c.limit) + " s");
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name << "  (" << std::fixed
              << std::setprecision(2) << secs << " s)  " << std::defaultfloat << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
