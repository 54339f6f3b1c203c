#include "orlicz/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/error.hpp"
#include "orlicz/io.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::size_t kGrain = 4096;

Provenance provenance_for(const GeneratorSpec& spec, const SeedSpec& seed) {
  Provenance p;
  p.generator = generator_to_json(spec);
  p.seed = seed.seed;
  p.stream = seed.stream_id;
  p.source = "generated";
  return p;
}

// Solves m log x + log L(x) = log e for x by bisection.
double invert_tail(const WeibullSymSpec& spec, double e) {
  if (spec.l.is_constant()) return std::pow(e / spec.l.coefficient, 1.0 / spec.m);
  const double target = std::log(e);
  auto h = [&](double x) { return spec.m * std::log(x) + spec.l.log_value(x); };
  double lo = 0.0, hi = 1.0;
  while (h(hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  const double tol = default_config().inversion_tol;
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (h(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> draw_weibull(const WeibullSymSpec& spec, std::size_t n, const SeedSpec& seed) {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  parallel_for(n, kGrain, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto w = rng.block(i);
      const double x = invert_tail(spec, -std::log(CounterRng::unit(w[0], w[1])));
      out[i] = (w[2] & 1u) ? x : -x;
    }
  });
  return out;
}

std::vector<double> rademacher_weights(const RademacherSeriesSpec& spec) {
  std::vector<double> w(spec.k - 1);
  for (std::size_t k = 2; k <= spec.k; ++k) w[k - 2] = std::pow(double(k), -spec.b) * spec.l(double(k));
  return w;
}

}  // namespace

void RademacherSeriesSpec::validate() const {
  require(b > 0.5 && b < 1.0, ErrorKind::kValidation, "Rademacher series needs B in (0.5, 1)");
  require(k >= 2, ErrorKind::kValidation, "Rademacher series needs truncation K >= 2");
  l.validate();
}

void WeibullSymSpec::validate() const {
  require(m > 0.0 && std::isfinite(m), ErrorKind::kValidation, "Weibull spec needs m > 0");
  l.validate();
  if (l.is_constant()) return;
  // x^m L(x) must increase without bound for the tail to be invertible.
  double prev = -std::numeric_limits<double>::infinity();
  for (double x : log_spaced(1e-6, 1e8, 512)) {
    const double h = m * std::log(x) + l.log_value(x);
    require(h > prev, ErrorKind::kValidation, "x^m L(x) is not increasing: tail is not invertible");
    prev = h;
  }
}

std::string generator_name(const GeneratorSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const GaussianSpec& s) { os << "gaussian(" << s.sigma << ")"; },
                 [&](const ExponentialSpec& s) { os << "exponential(" << s.scale << ")"; },
                 [&](const UniformSpec& s) { os << "uniform(" << s.half_width << ")"; },
                 [&](const GmLawSpec& s) { os << "gm_law(" << s.m << ")"; },
                 [&](const WeibullSymSpec& s) { os << "weibull(" << s.m << "," << s.l.describe() << ")"; },
                 [&](const RademacherSeriesSpec& s) {
                   os << "rademacher(B=" << s.b << ",K=" << s.k << "," << s.l.describe() << ")";
                 },
                 [&](const ProductSpec& s) { os << "product(" << s.xi.m << "," << s.eta.m << ")"; },
             },
             spec);
  return os.str();
}

void validate_generator(const GeneratorSpec& spec) {
  std::visit(Overloaded{
                 [](const GaussianSpec& s) {
                   require(s.sigma > 0.0, ErrorKind::kValidation, "gaussian sigma must be positive");
                 },
                 [](const ExponentialSpec& s) {
                   require(s.scale > 0.0, ErrorKind::kValidation, "exponential scale must be positive");
                 },
                 [](const UniformSpec& s) {
                   require(s.half_width > 0.0, ErrorKind::kValidation, "uniform half width must be positive");
                 },
                 [](const GmLawSpec& s) { require(s.m > 0.0, ErrorKind::kValidation, "g_m law needs m > 0"); },
                 [](const WeibullSymSpec& s) { s.validate(); },
                 [](const RademacherSeriesSpec& s) { s.validate(); },
                 [](const ProductSpec& s) {
                   s.xi.validate();
                   s.eta.validate();
                 },
             },
             spec);
}

Sample sample_rademacher_series(const RademacherSeriesSpec& spec, std::size_t n, const SeedSpec& seed) {
  spec.validate();
  require(n >= 1, ErrorKind::kValidation, "sample size must be positive");
  const auto w = rademacher_weights(spec);
  // Sign patterns of 8 consecutive terms are summed once into a 256-entry
  // table; each sample then costs one lookup per byte of randomness.
  const std::size_t blocks = (w.size() + 7) / 8;
  std::vector<double> table(blocks * 256);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t len = std::min<std::size_t>(8, w.size() - 8 * b);
    for (std::size_t v = 0; v < 256; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += ((v >> j) & 1u) ? w[8 * b + j] : -w[8 * b + j];
      table[b * 256 + v] = s;
    }
  }
  const std::size_t calls = (blocks + 15) / 16;
  const CounterRng rng(seed);
  std::vector<double> out(n);
  parallel_for(n, kGrain, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double s = 0.0;
      std::size_t b = 0;
      for (std::size_t c = 0; c < calls; ++c) {
        const auto r = rng.block(std::uint64_t(i) * calls + c);
        for (int word = 0; word < 4; ++word)
          for (int byte = 0; byte < 4 && b < blocks; ++byte, ++b)
            s += table[b * 256 + ((r[word] >> (8 * byte)) & 0xFFu)];
      }
      out[i] = s;
    }
  });
  return Sample(std::move(out), provenance_for(spec, seed));
}

Sample sample_weibull_symmetric(const WeibullSymSpec& spec, std::size_t n, const SeedSpec& seed) {
  spec.validate();
  require(n >= 1, ErrorKind::kValidation, "sample size must be positive");
  return Sample(draw_weibull(spec, n, seed), provenance_for(spec, seed));
}

Sample sample_product(const WeibullSymSpec& xi, const WeibullSymSpec& eta, std::size_t n,
                      const SeedSpec& seed) {
  xi.validate();
  eta.validate();
  require(n >= 1, ErrorKind::kValidation, "sample size must be positive");
  auto a = draw_weibull(xi, n, derive_stream(seed, 1));
  const auto b = draw_weibull(eta, n, derive_stream(seed, 2));
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  return Sample(std::move(a), provenance_for(ProductSpec{xi, eta}, seed));
}

Sample generate(const GeneratorSpec& spec, std::size_t n, const SeedSpec& seed) {
  validate_generator(spec);
  require(n >= 1, ErrorKind::kValidation, "sample size must be positive");
  auto simple = [&](auto draw) {
    const CounterRng rng(seed);
    std::vector<double> out(n);
    parallel_for(n, kGrain, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out[i] = draw(rng.block(i));
    });
    return Sample(std::move(out), provenance_for(spec, seed));
  };
  return std::visit(
      Overloaded{
          [&](const GaussianSpec& s) {
            return simple([&](const PhiloxCounter& w) {
              const double r = std::sqrt(-2.0 * std::log(CounterRng::unit(w[0], w[1])));
              return s.sigma * r * std::cos(2.0 * std::numbers::pi * CounterRng::unit(w[2], w[3]));
            });
          },
          [&](const ExponentialSpec& s) {
            return simple([&](const PhiloxCounter& w) { return -s.scale * std::log(CounterRng::unit(w[0], w[1])); });
          },
          [&](const UniformSpec& s) {
            return simple([&](const PhiloxCounter& w) {
              return s.half_width * (2.0 * CounterRng::unit(w[0], w[1]) - 1.0);
            });
          },
          [&](const GmLawSpec& s) {
            return simple([&](const PhiloxCounter& w) {
              return std::pow(-std::log(CounterRng::unit(w[0], w[1])), 1.0 / s.m);
            });
          },
          [&](const WeibullSymSpec& s) { return sample_weibull_symmetric(s, n, seed); },
          [&](const RademacherSeriesSpec& s) { return sample_rademacher_series(s, n, seed); },
          [&](const ProductSpec& s) { return sample_product(s.xi, s.eta, n, seed); },
      },
      spec);
}

double rademacher_variance(const RademacherSeriesSpec& spec) {
  spec.validate();
  auto w = rademacher_weights(spec);
  for (double& x : w) x *= x;
  return pairwise_sum(w);
}

double series_tail_sum(std::size_t k, double s, const SlowlyVaryingSpec& l, double q) {
  require(s > 1.0, ErrorKind::kValidation, "series tail needs exponent s > 1");
  // Exact terms up to n_direct, then the midpoint-rule integral of the rest in
  // log coordinates x = a e^t, where the integrand decays like e^{-(s-1)t}.
  const std::size_t n_direct = std::max<std::size_t>(k, 1000000);
  std::vector<double> terms;
  terms.reserve(n_direct - k);
  for (std::size_t i = k + 1; i <= n_direct; ++i)
    terms.push_back(std::exp(-s * std::log(double(i)) + q * l.log_value(double(i))));
  const double a = double(n_direct) + 0.5;
  const double decay = s - 1.0;
  double tail;
  if (l.is_constant()) {
    tail = std::pow(l.coefficient, q) * std::pow(a, -decay) / decay;
  } else {
    const double t_max = 60.0 / decay;
    const std::size_t steps = 200000;
    const double h = t_max / double(steps);
    std::vector<double> f(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
      const double t = h * double(i);
      const double x = a * std::exp(t);
      f[i] = std::exp(-s * std::log(x) + q * l.log_value(x) + std::log(x)) * h;
    }
    f.front() *= 0.5;
    f.back() *= 0.5;
    tail = pairwise_sum(f);
  }
  return pairwise_sum(terms) + tail;
}

double rademacher_truncation_variance(const RademacherSeriesSpec& spec) {
  spec.validate();
  return series_tail_sum(spec.k, 2.0 * spec.b, spec.l, 2.0);
}

double TailExponent::log_shape(double u) const {
  return exponent * std::log(u) - exponent * l.log_value(std::pow(u, exponent));
}

TailExponent rademacher_tail_exponent(const RademacherSeriesSpec& spec) {
  spec.validate();
  return {1.0 / (1.0 - spec.b), spec.b, spec.l};
}

MgfReport mgf_bound_check(const Sample& s, double m, const SlowlyVaryingSpec& l,
                          std::span<const double> lambda_grid) {
  require(m > 1.0, ErrorKind::kValidation, "MGF bound needs m > 1");
  l.validate();
  const auto xs = s.values();
  const double n = double(xs.size());
  const double mean = pairwise_sum(xs) / n;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
  const double sd = std::sqrt(pairwise_sum(dev) / n);
  require(std::abs(mean) <= 3.0 * sd / std::sqrt(n), ErrorKind::kPrecondition,
          "sample is not centred (|mean| > 3 sd / sqrt(n))");

  MgfReport rep;
  std::vector<double> scaled(xs.size());
  for (double lam : lambda_grid) {
    require(lam >= 0.0, ErrorKind::kValidation, "lambda must be nonnegative");
    double lm = 0.0, margin = 0.0;
    if (lam > 0.0) {
      for (std::size_t i = 0; i < xs.size(); ++i) scaled[i] = lam * xs[i];
      const double plus = log_sum_exp(scaled) - std::log(n);
      for (double& v : scaled) v = -v;
      const double minus = log_sum_exp(scaled) - std::log(n);
      lm = std::max(plus, minus);
      const double q = 1.0 / (m - 1.0);
      const double log_denom = m * q * std::log(lam) - q * l.log_value(std::pow(lam, q));
      margin = lm * std::exp(-log_denom);
      rep.c_min = std::max(rep.c_min, margin);
    }
    rep.lambda.push_back(lam);
    rep.log_mgf.push_back(lm);
    rep.margin.push_back(margin);
  }
  return rep;
}

}  // namespace orlicz
