#include "ccsymbol/witt.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ccsymbol;
using testsupport::Gen;

namespace {

AlgebraElement q(const AlgebraDescriptor& d, long n, long den = 1) { return AlgebraElement(d, frac(n, den)); }

LaurentSeries1D poly(const AlgebraDescriptor& d, std::initializer_list<std::pair<int, AlgebraElement>> terms) {
  LaurentSeries1D f(d);
  for (const auto& [n, c] : terms) f.set(n, f.coeff(n) + c);
  return f;
}

LaurentSeries1D factor(const AlgebraElement& a, int i) {
  return LaurentSeries1D::one(a.descriptor()) - monomial_1d(a, i);
}

LaurentSeries2D factor2(const AlgebraElement& a, int j, int i) {
  return LaurentSeries2D::one(a.descriptor()) - monomial_2d(a, j, i);
}

}  // namespace

TEST(SplitPlusMinus, Examples) {
  auto d = algebra_new({2});
  auto e = AlgebraElement::generator(d, 0);
  auto f1 = poly(d, {{0, q(d, 1)}, {1, q(d, 1)}});
  auto s1 = split_plus_minus(f1);
  EXPECT_EQ(s1.plus, f1);
  EXPECT_EQ(s1.minus, LaurentSeries1D::one(d));

  auto f2 = factor(e, -1);
  auto s2 = split_plus_minus(f2);
  EXPECT_EQ(s2.plus, LaurentSeries1D::one(d));
  EXPECT_EQ(s2.minus, f2);

  auto g = poly(d, {{0, q(d, 1)}, {1, q(d, 1)}});
  auto f3 = g * f2;
  auto s3 = split_plus_minus(f3);
  EXPECT_EQ(s3.plus, g);
  EXPECT_EQ(s3.minus, f2);
}

TEST(WittPlus, Examples) {
  auto d = algebra_new({});
  auto w1 = witt_plus(factor(q(d, 1), 1), 5);
  ASSERT_EQ(w1.params.size(), 1u);
  EXPECT_EQ(w1.params.at(1), q(d, 1));

  auto w2 = witt_plus(poly(d, {{0, q(d, 1)}, {1, q(d, 1)}, {2, q(d, 1)}}), 3);
  EXPECT_EQ(w2.params.at(1), q(d, -1));
  EXPECT_EQ(w2.params.at(2), q(d, -1));
  EXPECT_EQ(w2.params.at(3), q(d, 1));
  // (1+t)(1+t^2)(1-t^3) agrees with 1+t+t^2 mod t^4
  auto prod = factor(q(d, -1), 1) * factor(q(d, -1), 2) * factor(q(d, 1), 3);
  EXPECT_TRUE(agree_upto(prod, poly(d, {{0, q(d, 1)}, {1, q(d, 1)}, {2, q(d, 1)}}), 3));
}

TEST(WittPlus, HigherOrderUnitsHaveVanishingLowParams) {
  Gen g(21);
  for (int it = 0; it < 50; ++it) {
    auto d = g.algebra(2, 3);
    int n = g.uniform(2, 5);
    LaurentSeries1D f = LaurentSeries1D::one(d);
    for (int k = n; k <= n + 4; ++k) f.set(k, g.element(d));
    auto w = witt_plus(f.truncated(10), 10);
    for (const auto& kv : w.params) EXPECT_GE(kv.first, n);
  }
}

TEST(WittDecompose1D, Examples) {
  auto d = algebra_new({});
  auto f = monomial_1d(q(d, 1), 1) * factor(q(d, 1), 1);
  auto w = witt_decompose_1d(f, 6);
  EXPECT_EQ(w.omega, 1);
  EXPECT_TRUE(w.leading.is_one());
  EXPECT_EQ(w.plus_params.size(), 1u);
  EXPECT_EQ(w.plus(1), q(d, 1));

  auto d2 = algebra_new({2});
  auto e = AlgebraElement::generator(d2, 0);
  auto w2 = witt_decompose_1d(monomial_1d(e + Rational(1), -2), 6);
  EXPECT_EQ(w2.omega, -2);
  EXPECT_EQ(w2.leading, e + Rational(1));
  EXPECT_TRUE(w2.plus_params.empty());
  EXPECT_TRUE(w2.minus_params.empty());

  auto f3 = monomial_1d(q(d2, 1), 2) * factor(q(d2, 2), 1) * factor(e, -1);
  auto w3 = witt_decompose_1d(f3, 8);
  EXPECT_EQ(w3.omega, 2);
  EXPECT_TRUE(w3.leading.is_one());
  EXPECT_EQ(w3.plus_params.size(), 1u);
  EXPECT_EQ(w3.plus(1), q(d2, 2));
  EXPECT_EQ(w3.minus_params.size(), 1u);
  EXPECT_EQ(w3.minus(1), e);
}

TEST(WittDecompose1D, NotInGamma) {
  auto d = algebra_new({2});
  auto e = AlgebraElement::generator(d, 0);
  EXPECT_THROW(witt_decompose_1d(poly(d, {{0, e}, {3, e}}), 4), std::domain_error);
}

TEST(WittDecompose1D, Roundtrip) {
  Gen g(22);
  for (int it = 0; it < 100; ++it) {
    auto d = g.algebra(2, 4);
    int T = g.uniform(1, 12);
    auto w = g.witt_1d(d, T);
    auto f = testsupport::expand_1d(w);
    auto dec = witt_decompose_1d(f, T);
    EXPECT_EQ(dec.omega, w.omega);
    EXPECT_EQ(dec.leading, w.leading);
    ASSERT_GE(dec.plus_trunc, T);
    for (int i = 1; i <= T; ++i) EXPECT_EQ(dec.plus(i), w.plus(i)) << "i=" << i;
    EXPECT_EQ(dec.minus_params, w.minus_params);
    auto rec = reconstruct_1d(dec, T);
    EXPECT_TRUE(agree_upto(rec, f, w.omega + T));
  }
}

TEST(WittDecompose1D, TruncatedInput) {
  Gen g(23);
  for (int it = 0; it < 60; ++it) {
    auto d = g.algebra(2, 3);
    auto w = g.witt_1d(d, 10);
    // Minus factors pull coefficients down by up to K times their depth.
    int slack = d.nilpotency_index() * 3;
    auto f = testsupport::expand_1d(w).truncated(w.omega + 10 + slack);
    auto dec = witt_decompose_1d(f, 10);
    ASSERT_GE(dec.plus_trunc, 10);
    for (const auto& kv : dec.minus_params) EXPECT_TRUE(kv.second.in_ideal());
    auto rec = reconstruct_1d(dec, 10);
    EXPECT_TRUE(agree_upto(rec, f, rec.prec()));
    for (int i = 1; i <= dec.plus_trunc; ++i) EXPECT_EQ(dec.plus(i), w.plus(i));
  }
}

TEST(WittDecompose1D, OrderOfTermsIrrelevant) {
  Gen g(24);
  for (int it = 0; it < 30; ++it) {
    auto d = g.algebra(2, 3);
    auto w = g.witt_1d(d, 6);
    auto f = testsupport::expand_1d(w);
    LaurentSeries1D rev(d);
    std::vector<std::pair<int, AlgebraElement>> terms;
    f.for_each([&](int n, const AlgebraElement& c) { terms.emplace_back(n, c); });
    for (auto it2 = terms.rbegin(); it2 != terms.rend(); ++it2) rev.set(it2->first, it2->second);
    auto a = witt_decompose_1d(f, 6), b = witt_decompose_1d(rev, 6);
    EXPECT_EQ(a.plus_params, b.plus_params);
    EXPECT_EQ(a.minus_params, b.minus_params);
    EXPECT_EQ(a.leading, b.leading);
  }
}

TEST(WittPlus2D, Examples) {
  auto d = algebra_new({});
  auto r1 = witt_plus_2d_rows(factor2(q(d, 1), 1, 1), 4);
  EXPECT_EQ(r1.at(1).first.size(), 1u);
  EXPECT_EQ(r1.at(1).first.at(1), q(d, 1));
  for (int i = 2; i <= 4; ++i) EXPECT_TRUE(r1.at(i).first.empty());

  auto r2 = witt_plus_2d_rows(LaurentSeries2D::one(d) + monomial_2d(q(d, 1), -1, 1), 4);
  EXPECT_EQ(r2.at(1).first.at(-1), q(d, -1));
  for (int i = 2; i <= 4; ++i) EXPECT_TRUE(r2.at(i).first.empty());

  auto f3 = factor2(q(d, 1), 0, 1) * factor2(q(d, 1), 1, 2);
  auto r3 = witt_plus_2d_rows(f3, 5);
  EXPECT_EQ(r3.at(1).first.size(), 1u);
  EXPECT_EQ(r3.at(1).first.at(0), q(d, 1));
  EXPECT_EQ(r3.at(2).first.size(), 1u);
  EXPECT_EQ(r3.at(2).first.at(1), q(d, 1));
}

TEST(WittMinus2D, Examples) {
  auto d = algebra_new({2});
  auto e = AlgebraElement::generator(d, 0);
  auto r1 = witt_minus_2d_rows(factor2(e, 1, -1));
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_EQ(r1.at(-1).first.at(1), e);
  EXPECT_TRUE(witt_minus_2d_rows(LaurentSeries2D::one(d)).empty());

  auto d2 = algebra_new({2, 2});
  auto a = AlgebraElement::generator(d2, 0), b = AlgebraElement::generator(d2, 1);
  auto r2 = witt_minus_2d_rows(factor2(a, 0, -1) * factor2(b, 1, -2));
  EXPECT_EQ(r2.at(-1).first.at(0), a);
  EXPECT_EQ(r2.at(-2).first.at(1), b);
  EXPECT_EQ(r2.at(-1).first.size(), 1u);
  EXPECT_EQ(r2.at(-2).first.size(), 1u);
}

TEST(WittDecompose2D, Examples) {
  auto d = algebra_new({});
  auto w1 = witt_decompose_2d(monomial_2d(q(d, 1), 1, 1), 4, 4);
  EXPECT_EQ(w1.omega1, 1);
  EXPECT_EQ(w1.omega2, 1);
  EXPECT_TRUE(w1.params.empty());

  auto f2 = monomial_2d(q(d, 1), 0, 1) * factor2(q(d, 3), 1, 1);
  auto w2 = witt_decompose_2d(f2, 4, 4);
  EXPECT_EQ(w2.omega2, 1);
  EXPECT_EQ(w2.omega1, 0);
  EXPECT_EQ(w2.params.size(), 1u);
  EXPECT_EQ(w2.param(1, 1), q(d, 3));
  auto rec = reconstruct_2d(w2, 4, 4);
  EXPECT_TRUE(agree_upto(rec, f2, 4, 5));
}

TEST(WittDecompose2D, RowZeroComesFromPlusFactor) {
  // (1 - e t2^-1)(1 - t1 t2): the t2-constant level of the product is 1 + e t1,
  // but the row-0 parameters vanish.
  auto d = algebra_new({2});
  auto e = AlgebraElement::generator(d, 0);
  auto f = factor2(e, 0, -1) * factor2(q(d, 1), 1, 1);
  auto w = witt_decompose_2d(f, 5, 5);
  EXPECT_TRUE(w.row(0).empty());
  EXPECT_EQ(w.param(-1, 0), e);
  EXPECT_EQ(w.param(1, 1), q(d, 1));
  EXPECT_EQ(w.params.size(), 2u);
}

TEST(WittDecompose2D, Roundtrip) {
  Gen g(25);
  for (int it = 0; it < 25; ++it) {
    auto d = g.algebra(2, 3);
    auto w = g.witt_2d(d, 5);
    auto f = testsupport::expand_2d(w);
    SCOPED_TRACE(f.to_string());
    auto dec = witt_decompose_2d(f, 6, 6);
    EXPECT_EQ(dec.omega1, w.omega1);
    EXPECT_EQ(dec.omega2, w.omega2);
    EXPECT_EQ(dec.leading, w.leading);
    for (const auto& [key, a] : dec.params) {
      if (key.first > 6 || key.second > 6) continue;
      EXPECT_EQ(a, w.param(key.first, key.second)) << key.first << "," << key.second;
      if (key.first < 0) {
        EXPECT_TRUE(a.in_ideal());
      }
    }
    for (const auto& [key, a] : w.params) {
      auto rt = dec.row_trunc.find(key.first);
      ASSERT_NE(rt, dec.row_trunc.end());
      if (key.second <= rt->second) {
        EXPECT_EQ(dec.param(key.first, key.second), a);
      }
    }
    auto rec = reconstruct_2d(dec, 6, 6);
    EXPECT_TRUE(agree_upto(rec, f, w.omega1 + 6, w.omega2 + 6));
  }
}
