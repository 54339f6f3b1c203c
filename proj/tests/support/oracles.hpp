#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's fast paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace orlicz::oracle {

struct BruteMax {
  double value = -std::numeric_limits<double>::infinity();
  double z = 0.0;
};

// max over a uniform n-point grid of p z - f(z) on [lo, hi].
inline BruteMax brute_conjugate(const std::function<double(double)>& f, double lo, double hi,
                                std::size_t n, double p) {
  BruteMax best;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = lo + (hi - lo) * double(i) / double(n - 1);
    const double v = p * z - f(z);
    if (v > best.value) best = {v, z};
  }
  return best;
}

// Double-loop conjugate of tabulated data.
inline std::vector<double> brute_conjugate_table(const std::vector<double>& z, const std::vector<double>& f,
                                                 const std::vector<double>& dual) {
  std::vector<double> out(dual.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < dual.size(); ++j)
    for (std::size_t i = 0; i < z.size(); ++i) out[j] = std::max(out[j], dual[j] * z[i] - f[i]);
  return out;
}

// Lower convex envelope of tabulated data evaluated at the nodes (O(n^2)).
inline std::vector<double> convex_envelope(const std::vector<double>& z, const std::vector<double>& f) {
  std::vector<double> env(f);
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t a = 0; a < i; ++a)
      for (std::size_t b = i + 1; b < z.size(); ++b) {
        const double t = (z[i] - z[a]) / (z[b] - z[a]);
        env[i] = std::min(env[i], (1 - t) * f[a] + t * f[b]);
      }
  return env;
}

// Dense log-scan of beta -> delta^{2/(p b+2)} psi(alpha p)^{p b/(p b+2)}.
inline double brute_r_function(double delta, double p, const std::function<double(double)>& log_psi,
                               std::size_t n = 1000000, double beta_lo = 1.0 + 1e-3, double beta_hi = 1e3) {
  double best = std::numeric_limits<double>::infinity();
  const double a = std::log(beta_lo), b = std::log(beta_hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = std::exp(a + (b - a) * double(i) / double(n - 1));
    const double alpha = beta / (beta - 1.0);
    const double q = p * beta;
    const double v = 2.0 / (q + 2.0) * std::log(delta) + q / (q + 2.0) * log_psi(alpha * p);
    best = std::min(best, v);
  }
  return std::exp(best);
}

// E|G|^p for a standard Gaussian.
inline double gaussian_abs_moment(double p) {
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI));
}

// (E|X|^p)^{1/p} when P(|X| > u) = exp(-u^m).
inline double weibull_lp(double m, double p) { return std::exp(std::lgamma(1.0 + p / m) / p); }

// sum_{k=lo}^{hi} k^{-s}
inline double power_sum(std::size_t lo, std::size_t hi, double s) {
  double acc = 0.0;
  for (std::size_t k = hi; k >= lo && k > 0; --k) acc += std::pow(double(k), -s);
  return acc;
}

}  // namespace orlicz::oracle
