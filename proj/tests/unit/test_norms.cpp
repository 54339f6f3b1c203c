#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "orlicz/convex_transforms.hpp"
#include "orlicz/error.hpp"
#include "orlicz/generators.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/numeric.hpp"

using namespace orlicz;

namespace {

std::vector<double> values_of(const Sample& s) { return {s.values().begin(), s.values().end()}; }

NFunctionSpec square_n() {
  return n_from_w(tabulate([](double z) { return z * z; }, linear_spaced(0.0, 30.0, 3001), kDomainEnd, kDomainEnd));
}

}  // namespace

TEST(LpNorm, SpecExamples) {
  EXPECT_NEAR(lp_norm(std::vector<double>{1, 1, 1}, 7.0), 1.0, 1e-15);
  EXPECT_NEAR(lp_norm(std::vector<double>{0, 2}, 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lp_norm(std::vector<double>{0, 2}, 1000.0), 2.0 * std::pow(0.5, 1e-3), 1e-12);
  EXPECT_THROW(lp_norm(std::vector<double>{}, 2.0), Error);
  EXPECT_THROW(lp_norm(std::vector<double>{1.0}, 0.5), Error);
}

TEST(LpNorm, NoOverflowForHugeValues) {
  const std::vector<double> xs = {1e300, 1e300, 0.0};
  EXPECT_NEAR(lp_norm(xs, 500.0) / 1e300, std::pow(2.0 / 3.0, 1.0 / 500.0), 1e-12);
}

TEST(MomentCurve, ConstantAndTwoPoint) {
  const std::vector<double> p = {2.0, 4.0, 8.0};
  const auto flat = moment_curve(std::vector<double>(100, 3.0), p);
  for (double v : flat.lp_values) EXPECT_NEAR(v, 3.0, 1e-14);
  const auto two = moment_curve(std::vector<double>{0.0, 2.0}, p);
  EXPECT_NEAR(two.lp_values[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(two.lp_values[1], std::pow(8.0, 0.25), 1e-14);
  EXPECT_LT(two.lp_values[1], two.lp_values[2]);
  EXPECT_TRUE(two.above_cap);
}

TEST(MomentCurve, GaussianMomentsMatchClosedForm) {
  const auto s = generate(GaussianSpec{1.0}, 1000000, {42, 0});
  const auto p = linear_spaced(2.0, 8.0, 7);
  const auto c = moment_curve(s, p);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double exact = std::pow(oracle::gaussian_abs_moment(p[j]), 1.0 / p[j]);
    EXPECT_NEAR(c.lp_values[j] / exact, 1.0, 0.02) << p[j];
    EXPECT_TRUE(c.reliable[j]);
  }
}

TEST(MomentCurve, LyapunovMonotone) {
  const auto s = generate(WeibullSymSpec{0.7, {}}, 50000, {3, 0});
  const auto c = moment_curve(s, log_spaced(2.0, 200.0, 100));
  for (std::size_t j = 1; j < c.lp_values.size(); ++j) EXPECT_GE(c.lp_values[j], c.lp_values[j - 1]);
  EXPECT_TRUE(c.above_cap);
  EXPECT_FALSE(c.reliable.back());
}

TEST(GpsiNorm, SpecExamples) {
  const auto p = log_spaced(2.0, 32.0, 20);
  const auto c = moment_curve(std::vector<double>(10, 5.0), p);
  const auto rep = gpsi_norm(c, PsiSpec::mr(2.0));
  EXPECT_NEAR(rep.gpsi_norm, 5.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(rep.argmax_p, 2.0);
  EXPECT_EQ(gpsi_norm(moment_curve(std::vector<double>(10, 0.0), p), PsiSpec::mr(2.0)).gpsi_norm, 0.0);
}

TEST(GpsiNorm, HomogeneityIsExact) {
  const auto s = generate(WeibullSymSpec{2.0, {}}, 20000, {5, 0});
  const auto p = log_spaced(2.0, 20.0, 16);
  const double base = gpsi_norm(moment_curve(s, p), PsiSpec::mr(2.0)).gpsi_norm;
  for (double c : {0.25, 2.0, 1024.0}) {
    const double scaled = gpsi_norm(moment_curve(s.scaled(c), p), PsiSpec::mr(2.0)).gpsi_norm;
    EXPECT_NEAR(scaled, c * base, 1e-14 * c * base);
  }
}

TEST(GpsiNorm, TriangleInequality) {
  const auto x = values_of(generate(GaussianSpec{1.0}, 20000, {1, 0}));
  const auto y = values_of(generate(WeibullSymSpec{1.0, {}}, 20000, {1, 1}));
  std::vector<double> sum(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sum[i] = x[i] + y[i];
  const auto p = log_spaced(2.0, 28.0, 24);
  const auto psi = PsiSpec::mr(1.0);
  const double nx = gpsi_norm(moment_curve(x, p), psi).gpsi_norm;
  const double ny = gpsi_norm(moment_curve(y, p), psi).gpsi_norm;
  const double ns = gpsi_norm(moment_curve(sum, p), psi).gpsi_norm;
  EXPECT_LE(ns, nx + ny + 1e-12);
}

TEST(GpsiNorm, StableAcrossSampleSize) {
  const auto psi = PsiSpec::mr(2.0);
  const auto small = generate(WeibullSymSpec{2.0, {}}, 10000, {9, 0});
  const auto large = generate(WeibullSymSpec{2.0, {}}, 1000000, {9, 1});
  const auto p = log_spaced(2.0, 2.0 * std::log2(1e4), 24);
  const double a = gpsi_norm(moment_curve(small, p), psi).gpsi_norm;
  const double b = gpsi_norm(moment_curve(large, p), psi).gpsi_norm;
  EXPECT_NEAR(a / b, 1.0, 0.1);
}

TEST(Luxemburg, SpecExamples) {
  EXPECT_EQ(luxemburg_norm(std::vector<double>(5, 0.0), square_n()), 0.0);
  EXPECT_NEAR(luxemburg_norm(std::vector<double>(5, 1.0), NFunctionSpec::quadratic(1.0)), 2.0, 1e-9);
}

TEST(Luxemburg, Homogeneity) {
  const auto s = generate(GaussianSpec{1.0}, 20000, {8, 0});
  const auto n = square_n();
  const double base = luxemburg_norm(s, n);
  for (double c : {0.1, 3.0}) EXPECT_NEAR(luxemburg_norm(s.scaled(c), n), c * base, 1e-6 * c * base);
}

TEST(Luxemburg, GaussianWithinEquivalenceBand) {
  const auto s = generate(GaussianSpec{1.0}, 1000000, {12, 0});
  const double lux = luxemburg_norm(s, square_n());
  const auto p = log_spaced(2.0, 2.0 * std::log2(1e6), 32);
  const double g = gpsi_norm(moment_curve(s, p), psi_from_w(tabulate([](double z) { return z * z; },
                                                                          linear_spaced(2.0, 60.0, 5801)),
                                                                  log_spaced(2.0, 100.0, 400)))
                       .gpsi_norm;
  EXPECT_GT(lux / g, 0.05);
  EXPECT_LT(lux / g, 20.0);
}

TEST(Trend, BoundedSampleDecreases) {
  const auto s = generate(UniformSpec{1.0}, 200000, {4, 0});
  const auto c = moment_curve(s, log_spaced(2.0, 2.0 * std::log2(2e5), 48));
  for (const auto& psi : {PsiSpec::mr(1.0), PsiSpec::mr(4.0), PsiSpec::zbeta(0.1, 0.5)})
    EXPECT_EQ(g0_membership(c, psi).verdict, TrendVerdict::kDecreasing) << psi.name();
}

TEST(Trend, GmLawPlateauAndDecrease) {
  const double m = 2.0;
  const std::size_t n = 1 << 20;
  const auto s = generate(GmLawSpec{m}, n, {21, 0});
  const auto c = moment_curve(s, log_spaced(2.0, 2.0 * std::log2(double(n)), 48));
  EXPECT_EQ(g0_membership(c, PsiSpec::mr(m)).verdict, TrendVerdict::kPlateau);
  EXPECT_EQ(g0_membership(c, PsiSpec::mr(m / 2.0)).verdict, TrendVerdict::kDecreasing);
}

TEST(Trend, ZeroAndTooFewPoints) {
  const std::vector<double> p = {2, 3, 4};
  const std::vector<double> zero = {0, 0, 0};
  EXPECT_EQ(classify_trend(p, zero, {true, true, true}).verdict, TrendVerdict::kDecreasing);
  const std::vector<double> r = {1, 1, 1};
  EXPECT_EQ(classify_trend(p, r, {true, true, true}).verdict, TrendVerdict::kInconclusive);
}

TEST(Trend, GrowingRatio) {
  const auto p = log_spaced(2.0, 40.0, 20);
  std::vector<double> r;
  for (double v : p) r.push_back(v);
  EXPECT_EQ(classify_trend(p, r, std::vector<bool>(p.size(), true)).verdict, TrendVerdict::kGrowing);
}

TEST(Ucn, ScaledFamilyMatchesSingleMember) {
  const auto s = generate(GmLawSpec{1.0}, 1 << 18, {2, 0});
  const auto p = log_spaced(2.0, 36.0, 48);
  std::vector<MomentCurve> family;
  for (double c : {1.0, 1.25, 1.5, 2.0}) family.push_back(moment_curve(s.scaled(c), p));
  const auto single = g0_membership(family.front(), PsiSpec::mr(1.0));
  const auto env = ucn_diagnostic(family, PsiSpec::mr(1.0));
  EXPECT_EQ(env.verdict, single.verdict);
  for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(env.ratio[j], 2.0 * single.ratio[j], 1e-12 * env.ratio[j]);
}

TEST(Ucn, BoundedFamilyDecreases) {
  std::vector<MomentCurve> family;
  const auto p = log_spaced(2.0, 30.0, 40);
  for (std::uint64_t k = 0; k < 4; ++k) family.push_back(moment_curve(generate(UniformSpec{1.0 + k}, 100000, {k, 0}), p));
  EXPECT_EQ(ucn_diagnostic(family, PsiSpec::mr(2.0)).verdict, TrendVerdict::kDecreasing);
}

TEST(TailFit, WeibullAndExponentialSlopes) {
  const auto w = generate(WeibullSymSpec{2.0, {}}, 1000000, {31, 0});
  EXPECT_NEAR(tail_exponent_fit(w).slope, 2.0, 0.1);
  const auto e = generate(ExponentialSpec{1.0}, 1000000, {31, 1});
  const auto fit = tail_exponent_fit(e);
  EXPECT_NEAR(fit.slope, 1.0, 0.1);
  EXPECT_GE(fit.points, 8u);
  EXPECT_LT(fit.u_lo, fit.u_hi);
  EXPECT_EQ(fit.model, "weibull");
}

TEST(TailFit, BoundedSampleIsInsufficient) {
  std::vector<double> signs(100000);
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = i % 2 ? 1.0 : -1.0;
  try {
    tail_exponent_fit(signs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientTail);
  }
  EXPECT_THROW(tail_exponent_fit(std::vector<double>(100, 1.5)), Error);
}

TEST(TailFit, LogLogModelOnLogNormalLikeTail) {
  // log|X| exponential(1) => P(|X|>u) = 1/u, so -log P = log u and the loglog slope is 1.
  const auto e = generate(ExponentialSpec{1.0}, 1000000, {17, 0});
  std::vector<double> x;
  for (double v : e.values()) x.push_back(std::exp(v));
  EXPECT_NEAR(tail_exponent_fit(x, TailModel::kLogLog).slope, 1.0, 0.05);
}
