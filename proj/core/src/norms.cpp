#include "orlicz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = std::size_t{1} << 14;

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

// Sums over fixed-size chunks, then across chunks; the reduction tree does not
// depend on the worker count.
template <class Term>
double chunked_sum(std::size_t n, Term term) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks);
  parallel_for(chunks, 1, [&](std::size_t b, std::size_t e) {
    std::vector<double> buf(kChunk);
    for (std::size_t c = b; c < e; ++c) {
      const std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
      for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = term(i);
      partial[c] = pairwise_sum(std::span<const double>(buf.data(), hi - lo));
    }
  });
  return pairwise_sum(partial);
}

void require_p_grid(std::span<const double> p_grid) {
  require(!p_grid.empty(), ErrorKind::kValidation, "p-grid is empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    require(p_grid[i] >= 1.0 && std::isfinite(p_grid[i]), ErrorKind::kValidation,
            "p-grid entries must be finite and >= 1");
    if (i > 0) require(p_grid[i] > p_grid[i - 1], ErrorKind::kValidation, "p-grid must increase");
  }
}

}  // namespace

double lp_norm(std::span<const double> xs, double p) {
  require(!xs.empty(), ErrorKind::kValidation, "lp_norm of an empty sample");
  require(p >= 1.0, ErrorKind::kValidation, "lp_norm needs p >= 1");
  const double m = max_abs(xs);
  if (m == 0.0) return 0.0;
  const double s = chunked_sum(xs.size(), [&](std::size_t i) {
    return std::exp(p * std::log(std::abs(xs[i]) / m));
  });
  return m * std::exp(std::log(s / double(xs.size())) / p);
}

double lp_norm(const Sample& s, double p) { return lp_norm(s.values(), p); }

MomentCurve moment_curve(std::span<const double> xs, std::span<const double> p_grid) {
  require(!xs.empty(), ErrorKind::kValidation, "moment_curve of an empty sample");
  require_p_grid(p_grid);
  const auto& cfg = default_config();
  const std::size_t n = xs.size(), np = p_grid.size();
  MomentCurve c;
  c.p_grid.assign(p_grid.begin(), p_grid.end());
  c.n = n;
  c.cap = cfg.reliability_cap_factor * std::log2(double(std::max<std::size_t>(n, 2)));
  c.lp_values.assign(np, 0.0);
  c.ess.assign(np, 0.0);
  c.reliable.assign(np, false);
  const double m = max_abs(xs);
  if (m == 0.0) {
    for (std::size_t j = 0; j < np; ++j) {
      c.ess[j] = double(n);
      c.reliable[j] = p_grid[j] <= c.cap;
    }
    c.above_cap = p_grid.back() > c.cap;
    return c;
  }
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(std::abs(xs[i]) / m);

  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> s1(np * chunks), s2(np * chunks);
  parallel_for(chunks, 1, [&](std::size_t b, std::size_t e) {
    std::vector<double> w(kChunk), w2(kChunk);
    for (std::size_t ch = b; ch < e; ++ch) {
      const std::size_t lo = ch * kChunk, hi = std::min(n, lo + kChunk), len = hi - lo;
      for (std::size_t j = 0; j < np; ++j) {
        const double p = p_grid[j];
        for (std::size_t i = lo; i < hi; ++i) {
          w[i - lo] = std::exp(p * logs[i]);
          w2[i - lo] = w[i - lo] * w[i - lo];
        }
        s1[j * chunks + ch] = pairwise_sum(std::span<const double>(w.data(), len));
        s2[j * chunks + ch] = pairwise_sum(std::span<const double>(w2.data(), len));
      }
    }
  });
  for (std::size_t j = 0; j < np; ++j) {
    const double a = pairwise_sum(std::span<const double>(s1.data() + j * chunks, chunks));
    const double b = pairwise_sum(std::span<const double>(s2.data() + j * chunks, chunks));
    c.lp_values[j] = m * std::exp(std::log(a / double(n)) / p_grid[j]);
    c.ess[j] = a * a / b;
    c.reliable[j] = p_grid[j] <= c.cap && c.ess[j] >= cfg.ess_min;
    if (p_grid[j] > c.cap) c.above_cap = true;
  }
  for (std::size_t j = 1; j < np; ++j) {
    const double prev = c.lp_values[j - 1];
    if (c.lp_values[j] < prev) {
      require(prev - c.lp_values[j] <= cfg.lyapunov_tol_rel * 16.0 * prev, ErrorKind::kDegenerate,
              "moment curve violates the Lyapunov inequality");
      c.lp_values[j] = prev;
    }
  }
  return c;
}

MomentCurve moment_curve(const Sample& s, std::span<const double> p_grid) {
  return moment_curve(s.values(), p_grid);
}

NormReport gpsi_norm(const MomentCurve& curve, const PsiSpec& psi) {
  require(!curve.p_grid.empty(), ErrorKind::kValidation, "empty moment curve");
  NormReport rep;
  rep.psi = psi.name();
  rep.argmax_p = curve.p_grid.front();
  for (std::size_t j = 0; j < curve.p_grid.size(); ++j) {
    const double r = curve.lp_values[j] / psi(curve.p_grid[j]);
    if (r > rep.gpsi_norm) {
      rep.gpsi_norm = r;
      rep.argmax_p = curve.p_grid[j];
    }
  }
  return rep;
}

double luxemburg_norm(std::span<const double> xs, const NFunctionSpec& n_fn) {
  require(!xs.empty(), ErrorKind::kValidation, "luxemburg_norm of an empty sample");
  std::vector<double> logs;
  logs.reserve(xs.size());
  for (double x : xs)
    if (x != 0.0) logs.push_back(std::log(std::abs(x)));
  if (logs.empty()) return 0.0;
  std::sort(logs.begin(), logs.end());
  const double log_n = std::log(double(xs.size()));
  const double top = logs.back();

  // log of v^{-1}(1 + mean N(v x)) at v = e^t.
  auto objective = [&](double t) {
    const double lmax = n_fn.log_value(std::exp(t + top));
    if (!std::isfinite(lmax)) return kInf;
    const double s = chunked_sum(logs.size(), [&](std::size_t i) {
      return std::exp(n_fn.log_value(std::exp(t + logs[i])) - lmax);
    });
    const double lse = lmax + std::log(s) - log_n;
    const double softplus = lse > 0.0 ? lse + std::log1p(std::exp(-lse)) : std::log1p(std::exp(lse));
    return softplus - t;
  };

  constexpr double kHalfWidth = 60.0, kStep = 0.5;
  const int steps = int(2.0 * kHalfWidth / kStep);
  double best_t = 0.0, best = kInf;
  for (int k = 0; k <= steps; ++k) {
    const double t = -top - kHalfWidth + kStep * k;
    const double v = objective(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  require(std::isfinite(best), ErrorKind::kOutsideSpace,
          "Luxemburg objective is infinite across the scan: sample too heavy for " + n_fn.name());
  const auto res = golden_section_minimize(objective, best_t - kStep, best_t + kStep,
                                           default_config().golden_x_tol);
  return std::exp(std::min(best, res.value));
}

double luxemburg_norm(const Sample& s, const NFunctionSpec& n_fn) {
  return luxemburg_norm(s.values(), n_fn);
}

std::string_view to_string(TrendVerdict v) {
  switch (v) {
    case TrendVerdict::kDecreasing: return "decreasing";
    case TrendVerdict::kPlateau: return "plateau";
    case TrendVerdict::kGrowing: return "growing";
    case TrendVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TrendReport classify_trend(std::span<const double> p, std::span<const double> ratio,
                           const std::vector<bool>& reliable) {
  require(p.size() == ratio.size() && p.size() == reliable.size(), ErrorKind::kValidation,
          "trend inputs differ in length");
  const auto& cfg = default_config();
  TrendReport rep;
  rep.p.assign(p.begin(), p.end());
  rep.ratio.assign(ratio.begin(), ratio.end());
  rep.used.assign(p.size(), false);

  bool all_zero = true;
  for (double r : ratio) all_zero = all_zero && r == 0.0;
  if (all_zero) {
    rep.verdict = TrendVerdict::kDecreasing;
    return rep;
  }
  std::vector<double> c0, c1, c2, c3, y;
  double p_lo = kInf, p_hi = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!reliable[i] || !(ratio[i] > 0.0) || !std::isfinite(ratio[i])) continue;
    rep.used[i] = true;
    const double lp = std::log(p[i]);
    c0.push_back(1.0);
    c1.push_back(lp);
    c2.push_back(lp / p[i]);
    c3.push_back(1.0 / p[i]);
    y.push_back(std::log(ratio[i]));
    p_lo = std::min(p_lo, p[i]);
    p_hi = std::max(p_hi, p[i]);
  }
  rep.points = y.size();
  if (rep.points < cfg.trend_min_points || p_hi / p_lo < cfg.trend_min_p_ratio) return rep;
  const auto beta = least_squares({c0, c1, c2, c3}, y);
  rep.slope = beta[1];
  if (std::abs(rep.slope) <= cfg.plateau_slope)
    rep.verdict = TrendVerdict::kPlateau;
  else
    rep.verdict = rep.slope < 0.0 ? TrendVerdict::kDecreasing : TrendVerdict::kGrowing;
  return rep;
}

TrendReport g0_membership(const MomentCurve& curve, const PsiSpec& psi) {
  std::vector<double> ratio(curve.p_grid.size());
  for (std::size_t j = 0; j < ratio.size(); ++j) ratio[j] = curve.lp_values[j] / psi(curve.p_grid[j]);
  return classify_trend(curve.p_grid, ratio, curve.reliable);
}

TrendReport ucn_diagnostic(std::span<const MomentCurve> curves, const PsiSpec& psi) {
  require(!curves.empty(), ErrorKind::kValidation, "ucn_diagnostic needs a nonempty family");
  const auto& grid = curves.front().p_grid;
  std::vector<double> env(grid.size(), 0.0);
  std::vector<bool> reliable(grid.size(), true);
  for (const auto& c : curves) {
    require(c.p_grid == grid, ErrorKind::kValidation, "family curves must share one p-grid");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      env[j] = std::max(env[j], c.lp_values[j] / psi(grid[j]));
      reliable[j] = reliable[j] && c.reliable[j];
    }
  }
  return classify_trend(grid, env, reliable);
}

std::string_view to_string(TailModel m) {
  return m == TailModel::kWeibull ? "weibull" : "loglog";
}

TailFit tail_exponent_fit(std::span<const double> xs, TailModel model, double q_lo, double q_hi) {
  require(!xs.empty(), ErrorKind::kValidation, "tail fit of an empty sample");
  require(q_lo > 0.0 && q_hi > q_lo && q_hi < 1.0, ErrorKind::kValidation,
          "tail window needs 0 < q_lo < q_hi < 1");
  const auto& cfg = default_config();
  const std::size_t n = xs.size();
  const double dn = double(n);
  // Plotting position (r - 0.5)/n for descending rank r.
  const auto r_lo = std::size_t(std::max(1.0, std::ceil(q_lo * dn + 0.5)));
  const auto r_hi = std::size_t(std::floor(q_hi * dn + 0.5));
  TailFit fit;
  fit.model = std::string(to_string(model));
  fit.q_lo = q_lo;
  fit.q_hi = q_hi;
  if (r_hi < r_lo + cfg.fit_min_points - 1)
    fail(ErrorKind::kInsufficientTail, "sample too small for the tail window");

  std::vector<double> a(xs.size());
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(xs[i]);
  std::nth_element(a.begin(), a.begin() + std::ptrdiff_t(r_hi - 1), a.end(), std::greater<>());
  std::sort(a.begin(), a.begin() + std::ptrdiff_t(r_hi), std::greater<>());

  const auto targets = log_spaced(double(r_lo), double(std::max(r_hi, r_lo + 1)), cfg.fit_max_points);
  std::vector<std::size_t> ranks;
  for (double t : targets) {
    const auto r = std::clamp<std::size_t>(std::size_t(std::llround(t)), r_lo, r_hi);
    if (ranks.empty() || r != ranks.back()) ranks.push_back(r);
  }
  std::vector<double> x, y;
  double last_u = -1.0;
  for (std::size_t r : ranks) {
    const double u = a[r - 1];
    if (u == last_u) continue;  // ties carry no extra information
    if (model == TailModel::kWeibull ? !(u > 0.0) : !(u > 1.0)) continue;
    last_u = u;
    const double q = (double(r) - 0.5) / dn;
    fit.u.push_back(u);
    fit.tail.push_back(q);
    x.push_back(model == TailModel::kWeibull ? std::log(u) : std::log(std::log(u)));
    y.push_back(std::log(-std::log(q)));
  }
  if (x.size() < cfg.fit_min_points)
    fail(ErrorKind::kInsufficientTail,
         "tail window holds " + std::to_string(x.size()) + " distinct quantile points");
  const auto line = fit_line(x, y);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_stderr = line.slope_stderr;
  fit.points = line.points;
  fit.u_lo = *std::min_element(fit.u.begin(), fit.u.end());
  fit.u_hi = *std::max_element(fit.u.begin(), fit.u.end());
  return fit;
}

TailFit tail_exponent_fit(std::span<const double> xs, TailModel model) {
  const auto& cfg = default_config();
  return tail_exponent_fit(xs, model, cfg.fit_q_lo, cfg.fit_q_hi);
}

TailFit tail_exponent_fit(const Sample& s, TailModel model) { return tail_exponent_fit(s.values(), model); }

}  // namespace orlicz
