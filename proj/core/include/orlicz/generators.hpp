#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/rng.hpp"
#include "orlicz/sample.hpp"
#include "orlicz/slowly_varying.hpp"

namespace orlicz {

// xi = sum_{k=2}^{K} k^{-B} L(k) eps(k)
struct RademacherSeriesSpec {
  double b = 0.75;
  SlowlyVaryingSpec l;
  std::size_t k = 10000;
  void validate() const;
};

// |X| has tail exp(-x^m L(x)), symmetric sign.
struct WeibullSymSpec {
  double m = 2.0;
  SlowlyVaryingSpec l;
  void validate() const;
};

struct GaussianSpec {
  double sigma = 1.0;
};
// One-sided standard exponential, scaled.
struct ExponentialSpec {
  double scale = 1.0;
};
struct UniformSpec {
  double half_width = 1.0;  // uniform on [-a, a]
};
// g_m(U) = |log U|^{1/m}, U uniform: P(g > u) = exp(-u^m).
struct GmLawSpec {
  double m = 1.0;
};
struct ProductSpec {
  WeibullSymSpec xi;
  WeibullSymSpec eta;
};

using GeneratorSpec = std::variant<GaussianSpec, ExponentialSpec, UniformSpec, GmLawSpec, WeibullSymSpec,
                                   RademacherSeriesSpec, ProductSpec>;

std::string generator_name(const GeneratorSpec& spec);
void validate_generator(const GeneratorSpec& spec);

Sample sample_rademacher_series(const RademacherSeriesSpec& spec, std::size_t n, const SeedSpec& seed);
Sample sample_weibull_symmetric(const WeibullSymSpec& spec, std::size_t n, const SeedSpec& seed);
Sample sample_product(const WeibullSymSpec& xi, const WeibullSymSpec& eta, std::size_t n,
                      const SeedSpec& seed);
Sample generate(const GeneratorSpec& spec, std::size_t n, const SeedSpec& seed);

// sum_{k=2}^{K} k^{-2B} L(k)^2
double rademacher_variance(const RademacherSeriesSpec& spec);
// sum_{k>K} k^{-2B} L(k)^2, the variance dropped by truncation.
double rademacher_truncation_variance(const RademacherSeriesSpec& spec);

// sum_{k>K} k^{-s} L(k)^q for s > 1: exact terms to 10^6, integral beyond.
double series_tail_sum(std::size_t k, double s, const SlowlyVaryingSpec& l, double q);

// -log P(|xi| > u) grows like u^{1/(1-B)} Ltilde(u), Ltilde(u) = L(u^{1/(1-B)})^{-1/(1-B)}.
struct TailExponent {
  double exponent = 0.0;
  double b = 0.0;
  SlowlyVaryingSpec l;
  double log_shape(double u) const;  // log(u^{1/(1-B)} Ltilde(u))
};
TailExponent rademacher_tail_exponent(const RademacherSeriesSpec& spec);

struct MgfReport {
  std::vector<double> lambda;
  std::vector<double> log_mgf;  // max of log E exp(+lambda x) and log E exp(-lambda x)
  std::vector<double> margin;   // log_mgf / (lambda^{m/(m-1)} L(lambda^{1/(m-1)})^{-1/(m-1)})
  double c_min = 0.0;           // smallest C making the bound hold on the grid
};

MgfReport mgf_bound_check(const Sample& s, double m, const SlowlyVaryingSpec& l,
                          std::span<const double> lambda_grid);

}  // namespace orlicz
