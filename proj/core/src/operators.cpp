#include "orlicz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fft.hpp"
#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/psi_spec.hpp"

namespace orlicz {

namespace {

bool power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

}  // namespace

GridSignal::GridSignal(std::vector<double> values) : values_(std::move(values)) {
  require(values_.size() >= 8 && power_of_two(values_.size()), ErrorKind::kValidation,
          "grid signal length must be a power of two >= 8");
  for (double v : values_) require(std::isfinite(v), ErrorKind::kValidation, "grid signal holds a non-finite value");
}

GridSignal GridSignal::tabulate_midpoints(std::size_t m, const std::function<double(double)>& f) {
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j) v[j] = f((double(j) + 0.5) / double(m));
  return GridSignal(std::move(v));
}

double GridSignal::mean() const { return pairwise_sum(values_) / double(values_.size()); }

GridSignal fourier_partial_sum(const GridSignal& f, std::size_t n) {
  const std::size_t m = f.size();
  if (n >= m / 2) fail(ErrorKind::kAliasing, "partial sum order N must be below M/2");
  auto c = detail::rfft(f.values());
  for (std::size_t k = n + 1; k < c.size(); ++k) c[k] = 0.0;
  return GridSignal(detail::irfft(c, m));
}

GridSignal hilbert_transform(const GridSignal& f) {
  const std::size_t m = f.size();
  auto c = detail::rfft(f.values());
  c.front() = 0.0;
  c.back() = 0.0;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) c[k] *= std::complex<double>(0.0, -1.0);
  return GridSignal(detail::irfft(c, m));
}

double parseval_defect(const GridSignal& f) {
  const std::size_t m = f.size();
  std::vector<double> sq(m);
  for (std::size_t j = 0; j < m; ++j) sq[j] = f.values()[j] * f.values()[j];
  const double energy = pairwise_sum(sq) / double(m);
  const auto c = detail::rfft(f.values());
  std::vector<double> spec(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = (k == 0 || k == c.size() - 1) ? 1.0 : 2.0;
    spec[k] = w * std::norm(c[k] / double(m));
  }
  const double coeff = pairwise_sum(spec);
  if (energy == 0.0) return coeff;
  return std::abs(energy - coeff) / energy;
}

double hilbert_isometry_defect(const GridSignal& f) {
  const std::size_t m = f.size();
  const auto h = hilbert_transform(f);
  std::vector<double> fsq(m), hsq(m), alt(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double v = f.values()[j];
    fsq[j] = v * v;
    hsq[j] = h.values()[j] * h.values()[j];
    alt[j] = (j % 2 == 0) ? v : -v;
  }
  const double energy = pairwise_sum(fsq) / double(m);
  const double mean = f.mean();
  const double nyquist = pairwise_sum(alt) / double(m);
  const double defect = std::abs(pairwise_sum(hsq) / double(m) - (energy - mean * mean - nyquist * nyquist));
  return energy == 0.0 ? defect : defect / energy;
}

double gm_value(double m, double x) {
  require(x > 0.0 && x < 1.0, ErrorKind::kDomain, "g_m is evaluated on (0,1)");
  return std::pow(std::abs(std::log(x)), 1.0 / m);
}

GridSignal gm_signal(double m, std::size_t M) {
  require(m > 0.0, ErrorKind::kValidation, "g_m needs m > 0");
  require(power_of_two(M) && M >= 8, ErrorKind::kValidation, "M must be a power of two >= 8");
  return GridSignal::tabulate_midpoints(M, [m](double x) { return gm_value(m, x); });
}

GrowthFit riesz_growth_fit(const GridSignal& f, std::span<const double> p_grid,
                           std::span<const std::size_t> n_set) {
  require(!n_set.empty(), ErrorKind::kValidation, "N set is empty");
  require(p_grid.size() >= 2, ErrorKind::kValidation, "p-grid needs at least two points");
  const auto base = moment_curve(f.values(), p_grid);
  for (double v : base.lp_values)
    require(v > 0.0, ErrorKind::kDegenerate, "riesz_growth_fit needs a nonzero signal");
  GrowthFit fit;
  fit.p.assign(p_grid.begin(), p_grid.end());
  fit.ratio.assign(p_grid.size(), 0.0);
  for (std::size_t n : n_set) {
    const auto part = fourier_partial_sum(f, n);
    const auto curve = moment_curve(part.values(), p_grid);
    for (std::size_t j = 0; j < p_grid.size(); ++j)
      fit.ratio[j] = std::max(fit.ratio[j], curve.lp_values[j] / base.lp_values[j]);
  }
  std::vector<double> lx(p_grid.size()), ly(p_grid.size());
  for (std::size_t j = 0; j < p_grid.size(); ++j) {
    lx[j] = std::log(p_grid[j]);
    ly[j] = std::log(fit.ratio[j]);
    fit.single_c = std::max(fit.single_c, fit.ratio[j] / p_grid[j]);
  }
  const auto line = fit_line(lx, ly);
  fit.a = std::max(0.0, line.slope);
  fit.c = std::exp(line.intercept);
  fit.residuals.resize(p_grid.size());
  for (std::size_t j = 0; j < p_grid.size(); ++j) fit.residuals[j] = ly[j] - line.intercept - line.slope * lx[j];
  return fit;
}

double transfer_index(double m, double a, double b, double d) {
  require(m > 0.0 && a >= 0.0 && b > 0.0 && d > 0.0, ErrorKind::kValidation,
          "transfer_index needs m > 0, a >= 0, b > 0, d > 0");
  const double denom = a * m + b * d;
  require(denom > 0.0, ErrorKind::kValidation, "transfer_index denominator must be positive");
  return m / denom;
}

namespace {

struct GmTailPass {
  double band = 0.0;
  TailFit fit;
};

GmTailPass gm_tail_pass(double m, std::size_t M, double x_hi) {
  const auto g = gm_signal(m, M);
  const auto h = hilbert_transform(g);
  const double x_lo = 10.0 / double(M);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double x = (double(j) + 0.5) / double(M);
    if (x < x_lo) continue;
    if (x > x_hi) break;
    const double r = std::abs(h.values()[j]) / (std::pow(std::abs(std::log(x)), (m + 1.0) / m) + 1.0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  GmTailPass out;
  out.band = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  out.fit = tail_exponent_fit(h.values(), TailModel::kWeibull);
  return out;
}

}  // namespace

Lemma1Report lemma1_experiment(double m, std::size_t M) {
  require(m >= 1.0, ErrorKind::kValidation, "lemma1_experiment needs m >= 1");
  require(power_of_two(M) && M >= 1024, ErrorKind::kValidation, "lemma1_experiment needs M a power of two >= 1024");
  Lemma1Report rep;
  rep.m = m;
  rep.grid = M;
  rep.x_lo = 10.0 / double(M);
  require(rep.x_lo < rep.x_hi, ErrorKind::kValidation, "M too small for the ratio window");
  const auto coarse = gm_tail_pass(m, M, rep.x_hi);
  const auto fine = gm_tail_pass(m, 2 * M, rep.x_hi);
  rep.band = coarse.band;
  rep.band_refined = fine.band;
  rep.tail_fit = coarse.fit;
  rep.tail_slope = coarse.fit.slope;
  rep.tail_stderr = coarse.fit.slope_stderr;
  rep.tail_slope_refined = fine.fit.slope;
  rep.gm_tail_slope = tail_exponent_fit(gm_signal(m, M).values(), TailModel::kWeibull).slope;
  auto moved = [](double a, double b) { return std::abs(b - a) > 0.2 * std::abs(a); };
  rep.unresolved = moved(rep.band, rep.band_refined) || moved(rep.tail_slope, rep.tail_slope_refined);
  return rep;
}

NonconvergenceReport nonconvergence_experiment(double m, std::size_t M, std::span<const std::size_t> n_set,
                                               std::span<const double> p_grid) {
  require(!n_set.empty(), ErrorKind::kValidation, "N set is empty");
  const auto g = gm_signal(m, M);
  const auto psi = PsiSpec::mr(m, 0.0);
  NonconvergenceReport rep;
  rep.m = m;
  rep.grid = M;
  rep.n_set.assign(n_set.begin(), n_set.end());
  rep.p_grid.assign(p_grid.begin(), p_grid.end());
  for (std::size_t n : n_set) {
    const auto s = fourier_partial_sum(g, n);
    std::vector<double> r(M);
    for (std::size_t j = 0; j < M; ++j) r[j] = s.values()[j] - g.values()[j];
    const auto curve = moment_curve(r, p_grid);
    rep.gpsi_residual.push_back(gpsi_norm(curve, psi).gpsi_norm);
    rep.l2_residual.push_back(lp_norm(r, 2.0));
  }
  return rep;
}

}  // namespace orlicz
