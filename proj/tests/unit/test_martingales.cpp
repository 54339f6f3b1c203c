#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/convex_transforms.hpp"
#include "orlicz/error.hpp"
#include "orlicz/martingales.hpp"
#include "orlicz/numeric.hpp"

using namespace orlicz;

namespace {

struct Stats {
  double mean = 0.0, var = 0.0, second = 0.0, second_se = 0.0;
};

Stats column_stats(const PathCollection& pc, std::size_t j) {
  const double n = double(pc.paths.size());
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (const auto& p : pc.paths) {
    const double v = p.values[j];
    s += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  Stats st;
  st.mean = s / n;
  st.second = s2 / n;
  st.var = st.second - st.mean * st.mean;
  st.second_se = std::sqrt((s4 / n - st.second * st.second) / n);
  return st;
}

MartingaleSpec simple_spec(std::size_t n_max, std::size_t k = 0) {
  MartingaleSpec s;
  s.kind = SimpleKind{0.75, {}};
  s.n_max = n_max;
  s.truncation = k;
  return s;
}

}  // namespace

TEST(Simulate, SimpleVarianceAndMean) {
  const auto spec = simple_spec(256);
  const std::vector<std::size_t> times = {16, 256};
  const auto pc = simulate(spec, 20000, {1, 0}, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto st = column_stats(pc, j);
    const double exact = oracle::power_sum(2, times[j], 1.5);
    EXPECT_NEAR(second_moment(spec, times[j]), exact, 1e-12 * exact);
    EXPECT_NEAR(st.second, exact, 5.0 * st.second_se);
    EXPECT_NEAR(st.mean, 0.0, 3.0 * std::sqrt(exact / 20000.0) * 1.5);
  }
}

TEST(Simulate, SimpleIncrementsReproducibleFromSeed) {
  const auto spec = simple_spec(64);
  const SeedSpec seed{5, 2};
  const auto pc = simulate(spec, 3, seed);
  for (std::size_t path = 0; path < 3; ++path) {
    const auto& v = pc.paths[path].values;
    EXPECT_EQ(v[0], 0.0);
    for (std::size_t t = 2; t <= 64; ++t) {
      const double inc = v[t - 1] - v[t - 2];
      ASSERT_NEAR(inc, std::pow(double(t), -0.75) * martingale_sign(seed, path, t, 0), 1e-12);
    }
  }
}

TEST(Simulate, BucketedMartingaleProperty) {
  const auto pc = simulate(simple_spec(64), 40000, {9, 0});
  const std::size_t t = 40;  // increment from S_40 to S_41
  double sum_pos = 0.0, sum_neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& p : pc.paths) {
    const double inc = p.values[t] - p.values[t - 1];
    if (p.values[t - 1] > 0) {
      sum_pos += inc;
      ++n_pos;
    } else {
      sum_neg += inc;
      ++n_neg;
    }
  }
  const double sd = std::pow(41.0, -0.75);
  EXPECT_NEAR(sum_pos / double(n_pos), 0.0, 3.0 * sd / std::sqrt(double(n_pos)));
  EXPECT_NEAR(sum_neg / double(n_neg), 0.0, 3.0 * sd / std::sqrt(double(n_neg)));
}

TEST(Simulate, DoubleProductMoments) {
  MartingaleSpec spec;
  spec.kind = DoubleProductKind{0.75, {}};
  spec.n_max = 64;
  const std::vector<std::size_t> times = {8, 64};
  const auto pc = simulate(spec, 20000, {2, 0}, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    double t = 0.0, t2 = 0.0;
    for (std::size_t i = 1; i <= times[j]; ++i) {
      t += std::pow(double(i), -1.5);
      t2 += std::pow(double(i), -3.0);
    }
    const double exact = t * t - t2;
    EXPECT_NEAR(second_moment(spec, times[j]), exact, 1e-12 * exact);
    const auto st = column_stats(pc, j);
    EXPECT_NEAR(st.second, exact, 5.0 * st.second_se);
    EXPECT_NEAR(st.mean, 0.0, 4.0 * std::sqrt(exact / 20000.0));
  }
}

TEST(Simulate, YSeriesSecondMoment) {
  MartingaleSpec spec;
  spec.kind = YSeriesKind{0.75, 1.0, 3};
  spec.n_max = 32;
  const std::vector<std::size_t> times = {4, 32};
  const auto pc = simulate(spec, 20000, {3, 0}, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    // Brute force: sum_d C(d)^2 d! e_d(w^2) with e_d by direct subset enumeration.
    const std::size_t n = times[j];
    std::vector<double> e(4, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double w2 = std::pow(double(i), -1.5);
      for (std::size_t d = 3; d >= 1; --d) e[d] += w2 * e[d - 1];
    }
    double exact = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
      const double c = std::pow(double(d), -double(d));
      exact += c * c * std::tgamma(double(d) + 1.0) * e[d];
    }
    EXPECT_NEAR(second_moment(spec, n), exact, 1e-12 * exact);
    const auto st = column_stats(pc, j);
    EXPECT_NEAR(st.second, exact, 5.0 * st.second_se);
  }
}

TEST(Simulate, DeterministicAcrossRuns) {
  MartingaleSpec spec;
  spec.kind = DoubleProductKind{0.8, {}};
  spec.n_max = 50;
  const auto a = simulate(spec, 100, {7, 7});
  const auto b = simulate(spec, 100, {7, 7});
  for (std::size_t p = 0; p < 100; ++p) ASSERT_EQ(a.paths[p].values, b.paths[p].values);
}

TEST(Simulate, BudgetCutsHorizon) {
  auto spec = simple_spec(1000);
  spec.max_work = 100.0 * 200.0;
  const auto pc = simulate(spec, 100, {1, 0});
  EXPECT_TRUE(pc.partial);
  EXPECT_EQ(pc.horizon, 200u);
  EXPECT_EQ(pc.times.back(), 200u);
  spec.max_work = 50.0;
  try {
    simulate(spec, 100, {1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudget);
  }
}

TEST(Simulate, Validation) {
  MartingaleSpec bad;
  bad.kind = SimpleKind{0.4, {}};
  EXPECT_THROW(simulate(bad, 10, {}), Error);
  auto spec = simple_spec(100, 50);
  EXPECT_THROW(simulate(spec, 10, {}), Error);
}

TEST(TailVariance, SimpleMatchesSeries) {
  const auto spec = simple_spec(100);
  const double direct = oracle::power_sum(101, 10000000, 1.5) + std::pow(1e7 + 0.5, -0.5) / 0.5;
  EXPECT_NEAR(tail_variance(spec, 100), direct, 1e-8 * direct);
}

TEST(TailVariance, DoubleProductIsDifferenceOfMoments) {
  MartingaleSpec spec;
  spec.kind = DoubleProductKind{0.75, {}};
  spec.n_max = 100;
  // E(S_inf - S_K)^2 = E S_inf^2 - E S_K^2 for an L2 martingale.
  const double at_k = second_moment(spec, 100);
  const double far = second_moment(spec, 2000000);
  EXPECT_GT(tail_variance(spec, 100), far - at_k);
  EXPECT_LT(tail_variance(spec, 100), (far - at_k) * 1.05);
}

TEST(RFunction, MatchesBruteForceScan) {
  const auto psi = PsiSpec::mr(2.0);
  const double r = r_function(1e-4, 4.0, psi);
  const double brute = oracle::brute_r_function(1e-4, 4.0, [&](double q) { return psi.log_value(q); });
  EXPECT_NEAR(r / brute, 1.0, 1e-6);
}

TEST(RFunction, BelowClosedFormAndMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double delta = std::exp(-12.0 * u(rng) - 0.01);
    const double p = 2.0 + 30.0 * u(rng);
    const auto psi = PsiSpec::mr(0.5 + 3.0 * u(rng));
    const auto det = r_function_detail(delta, p, psi);
    const double cor = corollary1_bound(delta, p, psi);
    EXPECT_LE(det.value, cor * (1 + 1e-14));
    if (det.beta == 2.0) {
      EXPECT_DOUBLE_EQ(det.value, cor);
    }
    EXPECT_LE(r_function(delta * 0.5, p, psi), det.value * (1 + 1e-12));
    EXPECT_LE(det.value, r_function(delta, p, psi.scaled(1.5)) * (1 + 1e-12));
  }
}

TEST(RFunction, FlatPsiStub) {
  const auto flat = PsiSpec::grid_backed(GridFunction({2.0, 1e6}, {0.0, 0.0}));
  EXPECT_NEAR(r_function(1.0 - 1e-12, 4.0, flat), 1.0, 1e-9);
  EXPECT_THROW(r_function(1.0, 4.0, flat), Error);
  const auto short_grid = PsiSpec::grid_backed(GridFunction({2.0, 100.0}, {0.0, 0.0}));
  try {
    r_function(0.5, 4.0, short_grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDomain);
  }
}

TEST(ClosedFormRBound, Examples) {
  const auto psi = PsiSpec::mr(1.0);
  EXPECT_NEAR(corollary1_bound(1.0, 3.0, psi), std::pow(6.0, 0.75), 1e-12);
  EXPECT_NEAR(corollary1_bound(std::exp(-3.0), 2.0, psi), std::exp(-1.0) * std::pow(4.0, 2.0 / 3.0), 1e-12);
}

TEST(GammaBound, ZeroAndMonotone) {
  const auto p = log_spaced(2.0, 32.0, 12);
  const auto psi = PsiSpec::mr(4.0), nu = PsiSpec::mr(2.0);
  EXPECT_EQ(theorem9_bound(0.0, psi, nu, 1.0, p), 0.0);
  double prev = 0.0;
  for (double g : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
    const double b = theorem9_bound(g, psi, nu, 1.0, p);
    EXPECT_GE(b, prev);
    EXPECT_NEAR(theorem9_bound(g, psi, nu, 1.0, p, true), 2.0 * b, 1e-12 * b);
    prev = b;
  }
}

TEST(DeltaClasses, QuadraticHoldsBoth) {
  const auto rep = delta2_nabla2_check(NFunctionSpec::quadratic(1.0), log_spaced(1.0, 1e6, 64));
  EXPECT_EQ(rep.delta2, ClassVerdict::kHolds);
  EXPECT_NEAR(rep.delta2_beta, 4.0, 1e-9);
  EXPECT_EQ(rep.nabla2, ClassVerdict::kHolds);
  EXPECT_EQ(rep.nabla2_l, 2.0);
}

TEST(DeltaClasses, ExponentialFailsDoubling) {
  const auto n = n_from_w(tabulate([](double z) { return z * z; }, linear_spaced(0.0, 14.0, 14001)));
  const auto rep = delta2_nabla2_check(n, log_spaced(std::exp(2.0), std::exp(10.0), 64));
  EXPECT_EQ(rep.delta2, ClassVerdict::kFails);
  EXPECT_EQ(rep.nabla2, ClassVerdict::kHolds);
  EXPECT_EQ(rep.nabla2_l, 2.0);
  const auto narrow = delta2_nabla2_check(n, log_spaced(10.0, 20.0, 16));
  EXPECT_EQ(narrow.delta2, ClassVerdict::kUndecided);
}

TEST(PsiDoubling, MrConstant) {
  const auto p = log_spaced(2.0, 64.0, 10);
  EXPECT_NEAR(psi_doubling_constant(PsiSpec::mr(2.0), p), std::sqrt(2.0), 1e-12);
  EXPECT_GT(psi_doubling_constant(PsiSpec::zbeta(1.0, 1.0), p), 1e20);
}

TEST(Convergence, SmallSimpleRun) {
  const auto spec = simple_spec(256);
  const std::vector<std::size_t> cps = {2, 8, 32, 128, 256};
  const auto pc = simulate(spec, 2000, {4, 0}, cps);
  const auto rep = convergence_diagnostic(pc, PsiSpec::mr(4.0), PsiSpec::mr(2.0), cps);
  ASSERT_EQ(rep.rows.size(), cps.size());
  for (const auto& r : rep.rows) EXPECT_GE(r.bound, r.empirical_norm) << r.n;
  EXPECT_NEAR(rep.rows.back().gamma_n, std::sqrt(tail_variance(spec, 256)), 1e-15);
  EXPECT_EQ(rep.rows.back().empirical_norm, 0.0);
  EXPECT_EQ(rep.order.verdict, OrderVerdict::kDominated);
  EXPECT_FALSE(rep.wide_error);
  EXPECT_TRUE(rep.doob_ok);
  EXPECT_GT(rep.k_estimate, 0.0);
  const std::vector<std::size_t> missing = {3};
  EXPECT_THROW(convergence_diagnostic(pc, PsiSpec::mr(4.0), PsiSpec::mr(2.0), missing), Error);
}
