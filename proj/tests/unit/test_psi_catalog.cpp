#include <gtest/gtest.h>

#include <cmath>

#include "orlicz/convex_transforms.hpp"
#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/psi_catalog.hpp"

using namespace orlicz;

TEST(PsiEval, CatalogValues) {
  EXPECT_NEAR(psi_eval(PsiSpec::mr(2.0, 0.0), 4.0), 2.0, 1e-15);
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(psi_eval(PsiSpec::mr(1.0, 1.0), e2), e2 * 2.0, 1e-12);
  EXPECT_NEAR(psi_eval(PsiSpec::zbeta(1.0, 1.0), 3.0), std::exp(3.0), 1e-12);
  EXPECT_THROW(psi_eval(PsiSpec::mr(1.0), 1.5), Error);
}

TEST(PsiEval, ScalingMultiplies) {
  const auto psi = PsiSpec::mr(2.0, 1.0);
  EXPECT_NEAR(psi.scaled(3.0)(7.0), 3.0 * psi(7.0), 1e-12);
  EXPECT_THROW(psi.scaled(0.0), Error);
}

TEST(PsiSpecValidation, CatalogSpecsPass) {
  for (double m : {0.5, 1.0, 2.0, 4.0})
    for (double r : {0.0, 0.25}) EXPECT_NO_THROW(validate_psi(PsiSpec::mr(m, r))) << m << " " << r;
  // r log log p bends p log psi(p) concave just above p = 2 once r is large.
  EXPECT_THROW(validate_psi(PsiSpec::mr(4.0, 2.0)), Error);
  for (double z : {0.25, 1.0})
    for (double b : {0.5, 1.0}) EXPECT_NO_THROW(validate_psi(PsiSpec::zbeta(z, b)));
  EXPECT_THROW(PsiSpec::mr(-1.0), Error);
  EXPECT_THROW(PsiSpec::zbeta(1.0, 0.0), Error);
}

TEST(PsiSpecValidation, CatalogPsiGrowsWithoutBound) {
  for (const auto& psi : {PsiSpec::mr(4.0), PsiSpec::mr(0.5, 1.0), PsiSpec::zbeta(0.5, 0.2)})
    EXPECT_GT(psi(1e6), 10.0 * psi(2.0));
}

TEST(TailProfile, ZBetaDisplayedConstant) {
  EXPECT_NEAR(log_tail_profile(PsiSpec::zbeta(1.0, 1.0), std::exp(4.0)), -64.0, 1e-10);
  EXPECT_NEAR(tail_profile(PsiSpec::zbeta(1.0, 1.0), std::exp(4.0)), std::exp(-64.0), 1e-36);
  EXPECT_THROW(tail_profile(PsiSpec::zbeta(1.0, 1.0), 5.0), Error);
}

TEST(TailProfile, GridBackedReproducesGenerator) {
  const auto w = tabulate([](double z) { return z * z; }, linear_spaced(2.0, 40.0, 3801));
  const auto psi = psi_from_w(w, linear_spaced(2.0, 60.0, 5801));
  EXPECT_NEAR(log_tail_profile(psi, std::exp(3.0)), -9.0, 1e-6 * 9.0);
  for (double z : {2.5, 4.0, 7.0, 11.0}) {
    const double direct = -conjugate_value(std::get<GridPsi>(psi.kind()).p_log_psi, z);
    EXPECT_NEAR(log_tail_profile(psi, std::exp(z)), direct, 1e-6 * std::abs(direct));
    EXPECT_NEAR(log_tail_profile(psi, std::exp(z)), -z * z, 1e-3 * z * z);
  }
}

TEST(TailProfile, MrSlopeIsM) {
  for (double m : {1.0, 2.0, 3.0}) {
    std::vector<double> lx, ly;
    for (double x : log_spaced(10.0, 1e4, 40)) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(-log_tail_profile(PsiSpec::mr(m), x)));
    }
    EXPECT_NEAR(fit_line(lx, ly).slope, m, 1e-9);
  }
}

TEST(TailProfile, ScaledSpecStretchesTheArgument) {
  const auto psi = PsiSpec::mr(2.0);
  EXPECT_NEAR(log_tail_profile(psi.scaled(2.0), 40.0), log_tail_profile(psi, 20.0), 1e-12);
}

TEST(SlowlyVarying, Residuals) {
  const std::vector<double> u = {2.0, 10.0, 1e3, 1e8};
  for (double r : slowly_varying_residual(SlowlyVaryingSpec::constant(3.0), u)) EXPECT_EQ(r, 0.0);
  const std::vector<double> big = {std::exp(100.0)};
  EXPECT_NEAR(slowly_varying_residual(SlowlyVaryingSpec::log_power(1.0), big)[0], std::log(100.0) / 100.0, 1e-4);
  const auto decay = slowly_varying_residual(SlowlyVaryingSpec::log_power(-1.0), log_spaced(1e3, 1e200, 50));
  for (std::size_t i = 1; i < decay.size(); ++i) EXPECT_LT(decay[i], decay[i - 1]);
  EXPECT_LT(decay.back(), 0.02);
}

TEST(SlowlyVarying, ProductAndDescribe) {
  const auto l = SlowlyVaryingSpec::constant(2.0) * SlowlyVaryingSpec::log_power(1.0);
  EXPECT_NEAR(l(10.0), 2.0 * std::log(12.0), 1e-12);
  EXPECT_FALSE(l.is_constant());
  EXPECT_TRUE(SlowlyVaryingSpec::constant(5.0).is_constant());
  EXPECT_THROW(SlowlyVaryingSpec::constant(0.0), Error);
  EXPECT_THROW(SlowlyVaryingSpec::log_power(1.0, 1.0), Error);
}

TEST(EssentialOrder, SpecExamples) {
  const auto p = log_spaced(2.0, 256.0, 64);
  auto r = essential_order(PsiSpec::mr(2.0), PsiSpec::mr(1.0), p);
  EXPECT_EQ(r.verdict, OrderVerdict::kDominated);
  EXPECT_NEAR(r.slope, -0.5, 1e-9);
  r = essential_order(PsiSpec::mr(2.0), PsiSpec::mr(2.0), p);
  EXPECT_EQ(r.verdict, OrderVerdict::kComparable);
  EXPECT_NEAR(r.band, 1.0, 1e-12);
  r = essential_order(PsiSpec::mr(2.0, 1.0), PsiSpec::mr(2.0), p);
  EXPECT_EQ(r.verdict, OrderVerdict::kDominating);
}

TEST(EssentialOrder, Antisymmetric) {
  const auto p = log_spaced(2.0, 256.0, 64);
  const std::vector<PsiSpec> specs = {PsiSpec::mr(0.5), PsiSpec::mr(1.0, 1.0), PsiSpec::mr(3.0),
                                      PsiSpec::zbeta(0.5, 0.5)};
  for (const auto& a : specs)
    for (const auto& b : specs) {
      const auto ab = essential_order(a, b, p).verdict;
      const auto ba = essential_order(b, a, p).verdict;
      if (ab == OrderVerdict::kDominated) {
        EXPECT_EQ(ba, OrderVerdict::kDominating);
      } else if (ab == OrderVerdict::kDominating) {
        EXPECT_EQ(ba, OrderVerdict::kDominated);
      } else if (ab == OrderVerdict::kComparable) {
        EXPECT_EQ(ba, OrderVerdict::kComparable);
      }
    }
}

TEST(EssentialOrder, ConstantMultipleIsComparable) {
  const auto p = log_spaced(2.0, 256.0, 64);
  EXPECT_EQ(essential_order(PsiSpec::mr(2.0).scaled(5.0), PsiSpec::mr(2.0), p).verdict, OrderVerdict::kComparable);
  EXPECT_EQ(essential_order(PsiSpec::mr(2.0).scaled(50.0), PsiSpec::mr(2.0), p).verdict, OrderVerdict::kComparable);
}

TEST(MrConsistency, GeneratorClosedForm) {
  for (double m : {0.5, 1.0, 2.0}) {
    const auto z = linear_spaced(1.8 / m, 5.0 / m, 30);
    const auto p = log_spaced(2.0, std::exp(m * z.back() + 0.5), 6000);
    const auto w = w_from_psi(PsiSpec::mr(m), z, p);
    for (std::size_t i = 1; i + 1 < z.size(); ++i)
      EXPECT_NEAR(w(z[i]) * m * std::exp(1.0 - m * z[i]), 1.0, 1e-3) << "m=" << m << " z=" << z[i];
  }
}
