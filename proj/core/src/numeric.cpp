#include "orlicz/numeric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "orlicz/config.hpp"
#include "orlicz/error.hpp"

namespace orlicz {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kTruncatedDomain: return "truncated-domain";
    case ErrorKind::kInsufficientTail: return "insufficient-tail";
    case ErrorKind::kOutsideSpace: return "outside-space";
    case ErrorKind::kAliasing: return "aliasing";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kBudget: return "budget";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

const NumericConfig& default_config() {
  static const NumericConfig config;
  return config;
}

double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 128;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double log_sum_exp(std::span<const double> xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  std::vector<double> shifted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = std::exp(xs[i] - top);
  return top + std::log(pairwise_sum(shifted));
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo && n >= 2, ErrorKind::kValidation,
          "log_spaced needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t n) {
  require(hi > lo && n >= 2, ErrorKind::kValidation, "linear_spaced needs lo < hi and n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  out.back() = hi;
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::kValidation,
          "fit_line needs two equally sized samples of length >= 2");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::kDegenerate, "fit_line: abscissas are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> y) {
  require(!columns.empty() && y.size() >= columns.size(), ErrorKind::kValidation,
          "least_squares: need at least as many rows as columns");
  Eigen::MatrixXd a(y.size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j].size() == y.size(), ErrorKind::kValidation,
            "least_squares: column length mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) a(Eigen::Index(i), Eigen::Index(j)) = columns[j][i];
  }
  const Eigen::Map<const Eigen::VectorXd> b(y.data(), Eigen::Index(y.size()));
  const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(b);
  return {beta.data(), beta.data() + beta.size()};
}

MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                       double hi, double x_tol, int max_iter) {
  require(hi >= lo, ErrorKind::kValidation, "golden_section_minimize: empty bracket");
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  // Compare the interior best with the bracket ends so boundary minima are kept.
  MinimizeResult best{c, fc};
  if (fd < best.value) best = {d, fd};
  const double fa = f(a), fb = f(b);
  if (fa < best.value) best = {a, fa};
  if (fb < best.value) best = {b, fb};
  return best;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("ORLICZ_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return std::size_t(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace orlicz
