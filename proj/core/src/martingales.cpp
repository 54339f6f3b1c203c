#include "orlicz/martingales.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/generators.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::uint64_t kSimpleSeq = 0;
constexpr std::uint64_t kProductSeq1 = 1;
constexpr std::uint64_t kProductSeq2 = 2;
std::uint64_t y_sequence(std::size_t d, std::size_t i) { return 1000 + 64 * d + i; }

// Signs eps(index) of one (path, sequence), 128 per Philox block.
class SignSource {
 public:
  SignSource(const SeedSpec& seed, std::uint64_t path, std::uint64_t sequence)
      : rng_(derive_stream(seed, sequence)), path_(path) {}

  int operator()(std::uint64_t index) {
    const std::uint64_t b = (path_ << 32) | (index >> 7);
    if (b != cached_) {
      block_ = rng_.block(b);
      cached_ = b;
    }
    const unsigned bit = unsigned(index & 127u);
    return ((block_[bit >> 5] >> (bit & 31u)) & 1u) ? 1 : -1;
  }

 private:
  CounterRng rng_;
  std::uint64_t path_;
  std::uint64_t cached_ = ~std::uint64_t{0};
  PhiloxCounter block_{};
};

std::vector<double> weights(double b, const SlowlyVaryingSpec& l, std::size_t k) {
  std::vector<double> w(k + 1, 0.0);
  for (std::size_t i = 1; i <= k; ++i) w[i] = std::pow(double(i), -b) * l(double(i));
  return w;
}

double step_cost(const MartingaleSpec& spec) {
  if (const auto* y = std::get_if<YSeriesKind>(&spec.kind)) {
    double c = 0.0;
    for (std::size_t d = 1; d <= y->d_max; ++d) c += double(d) * std::ldexp(1.0, int(d) - 1);
    return c;
  }
  return 1.0;
}

double c_weight(double gamma, std::size_t d) { return std::exp(-double(d) * gamma * std::log(double(d))); }

// Elementary symmetric polynomials e_0..e_dmax from power sums p_1..p_dmax.
std::vector<double> elementary_from_power(const std::vector<double>& p, std::size_t d_max) {
  std::vector<double> e(d_max + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t d = 1; d <= d_max; ++d) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= d; ++j) acc += ((j % 2) ? 1.0 : -1.0) * e[d - j] * p[j];
    e[d] = acc / double(d);
  }
  return e;
}

double factorial(std::size_t d) {
  double f = 1.0;
  for (std::size_t i = 2; i <= d; ++i) f *= double(i);
  return f;
}

}  // namespace

void MartingaleSpec::validate() const {
  require(n_max >= 2, ErrorKind::kValidation, "martingale horizon n_max must be >= 2");
  require(truncation == 0 || truncation >= n_max, ErrorKind::kValidation, "truncation K must be >= n_max");
  require(max_work >= 0.0, ErrorKind::kValidation, "work budget must be nonnegative");
  require(k() < (std::size_t{1} << 38), ErrorKind::kValidation, "truncation index too large");
  std::visit(Overloaded{
                 [](const SimpleKind& s) {
                   require(s.b > 0.5 && s.b < 1.0, ErrorKind::kValidation, "martingale needs B in (0.5, 1)");
                   s.l0.validate();
                 },
                 [](const DoubleProductKind& s) {
                   require(s.b > 0.5 && s.b < 1.0, ErrorKind::kValidation, "martingale needs B in (0.5, 1)");
                   s.l0.validate();
                 },
                 [](const YSeriesKind& s) {
                   require(s.b > 0.5 && s.b < 1.0, ErrorKind::kValidation, "martingale needs B in (0.5, 1)");
                   require(s.gamma > 0.0, ErrorKind::kValidation, "YSeries needs gamma > 0");
                   require(s.d_max >= 1 && s.d_max <= 16, ErrorKind::kValidation, "YSeries needs 1 <= d_max <= 16");
                 },
             },
             kind);
}

std::string MartingaleSpec::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const SimpleKind& s) { os << "simple(B=" << s.b << ")"; },
                 [&](const DoubleProductKind& s) { os << "double_product(B=" << s.b << ")"; },
                 [&](const YSeriesKind& s) {
                   os << "y_series(B=" << s.b << ",gamma=" << s.gamma << ",d_max=" << s.d_max << ")";
                 },
             },
             kind);
  os << "[n_max=" << n_max << ",K=" << k() << "]";
  return os.str();
}

int martingale_sign(const SeedSpec& seed, std::uint64_t path, std::uint64_t index, std::uint64_t sequence) {
  SignSource src(seed, path, sequence);
  return src(index);
}

PathCollection simulate(const MartingaleSpec& spec, std::size_t n_paths, const SeedSpec& seed,
                        std::span<const std::size_t> times) {
  spec.validate();
  require(n_paths >= 1, ErrorKind::kValidation, "need at least one path");
  require(n_paths < (std::size_t{1} << 31), ErrorKind::kValidation, "too many paths");
  PathCollection out;
  out.spec = spec;
  out.seed = seed;
  out.horizon = spec.n_max;
  out.truncation = spec.k();
  const double cost = step_cost(spec);
  if (spec.max_work > 0.0 && double(n_paths) * double(out.truncation) * cost > spec.max_work) {
    const auto h = std::size_t(spec.max_work / (double(n_paths) * cost));
    require(h >= 2, ErrorKind::kBudget, "work budget does not cover two steps per path");
    out.horizon = std::min(out.horizon, h);
    out.truncation = h;
    out.partial = true;
  }
  if (times.empty()) {
    for (std::size_t t = 1; t <= spec.n_max; ++t) out.times.push_back(t);
  } else {
    for (std::size_t i = 0; i < times.size(); ++i) {
      require(times[i] >= 1 && times[i] <= spec.n_max, ErrorKind::kValidation, "recorded times must lie in [1, n_max]");
      if (i > 0) require(times[i] > times[i - 1], ErrorKind::kValidation, "recorded times must increase");
    }
    out.times.assign(times.begin(), times.end());
  }
  std::erase_if(out.times, [&](std::size_t t) { return t > out.horizon; });
  out.tail_variance = tail_variance(spec, out.truncation);

  const std::size_t k_trunc = out.truncation, horizon = out.horizon;
  const auto& recorded = out.times;
  out.paths.resize(n_paths);

  // Feeds S_t for t = 1..K and records values at the requested times.
  auto run = [&](MartingalePath& path, auto&& step) {
    path.values.reserve(recorded.size());
    path.running_max.reserve(recorded.size());
    std::size_t next = 0;
    double run_max = 0.0, s = 0.0;
    for (std::size_t t = 1; t <= k_trunc; ++t) {
      s = step(t);
      if (t <= horizon) run_max = std::max(run_max, std::abs(s));
      if (next < recorded.size() && recorded[next] == t) {
        path.values.push_back(s);
        path.running_max.push_back(run_max);
        ++next;
      }
    }
    path.limit_value = s;
  };

  std::visit(
      Overloaded{
          [&](const SimpleKind& kind) {
            const auto w = weights(kind.b, kind.l0, k_trunc);
            parallel_for(n_paths, 16, [&](std::size_t lo, std::size_t hi) {
              for (std::size_t p = lo; p < hi; ++p) {
                SignSource eps(seed, p, kSimpleSeq);
                double s = 0.0;
                run(out.paths[p], [&](std::size_t t) {
                  if (t >= 2) s += w[t] * eps(t);
                  return s;
                });
              }
            });
          },
          [&](const DoubleProductKind& kind) {
            const auto w = weights(kind.b, kind.l0, k_trunc);
            parallel_for(n_paths, 16, [&](std::size_t lo, std::size_t hi) {
              for (std::size_t p = lo; p < hi; ++p) {
                SignSource e1(seed, p, kProductSeq1), e2(seed, p, kProductSeq2);
                double a = 0.0, b = 0.0, diag = 0.0;
                run(out.paths[p], [&](std::size_t t) {
                  const double x = w[t] * e1(t), y = w[t] * e2(t);
                  a += x;
                  b += y;
                  diag += x * y;
                  return a * b - diag;
                });
              }
            });
          },
          [&](const YSeriesKind& kind) {
            std::vector<double> w(k_trunc + 1, 0.0);
            for (std::size_t t = 1; t <= k_trunc; ++t) w[t] = std::pow(double(t), -kind.b);
            std::vector<double> cd(kind.d_max + 1);
            for (std::size_t d = 1; d <= kind.d_max; ++d) cd[d] = c_weight(kind.gamma, d);
            parallel_for(n_paths, 4, [&](std::size_t lo, std::size_t hi) {
              for (std::size_t p = lo; p < hi; ++p) {
                std::vector<std::vector<double>> e(kind.d_max + 1);
                std::vector<std::vector<SignSource>> eps(kind.d_max + 1);
                for (std::size_t d = 1; d <= kind.d_max; ++d) {
                  e[d].assign(std::size_t{1} << d, 0.0);
                  e[d][0] = 1.0;
                  for (std::size_t i = 0; i < d; ++i) eps[d].emplace_back(seed, p, y_sequence(d, i));
                }
                std::vector<double> a(kind.d_max);
                run(out.paths[p], [&](std::size_t t) {
                  double y = 0.0;
                  for (std::size_t d = 1; d <= kind.d_max; ++d) {
                    for (std::size_t i = 0; i < d; ++i) a[i] = w[t] * eps[d][i](t);
                    auto& ed = e[d];
                    // Index t joins at most one position; descending masks read
                    // the subsets' values from step t-1.
                    for (std::size_t mask = ed.size() - 1; mask >= 1; --mask) {
                      double add = 0.0;
                      for (std::size_t rest = mask; rest; rest &= rest - 1) {
                        const auto i = std::size_t(std::countr_zero(rest));
                        add += a[i] * ed[mask & ~(std::size_t{1} << i)];
                      }
                      ed[mask] += add;
                    }
                    y += cd[d] * ed.back();
                  }
                  return y;
                });
              }
            });
          },
      },
      spec.kind);
  return out;
}

double tail_variance(const MartingaleSpec& spec, std::size_t k) {
  return std::visit(
      Overloaded{
          [&](const SimpleKind& s) { return series_tail_sum(k, 2.0 * s.b, s.l0, 2.0); },
          [&](const DoubleProductKind& s) {
            const auto w = weights(s.b, s.l0, k);
            std::vector<double> w2(k), w4(k);
            for (std::size_t i = 1; i <= k; ++i) {
              w2[i - 1] = w[i] * w[i];
              w4[i - 1] = w2[i - 1] * w2[i - 1];
            }
            const double t_k = pairwise_sum(w2);
            const double t1 = series_tail_sum(k, 2.0 * s.b, s.l0, 2.0);
            const double t2 = series_tail_sum(k, 4.0 * s.b, s.l0, 4.0);
            return 2.0 * t_k * t1 + t1 * t1 - t2;
          },
          [&](const YSeriesKind& s) {
            const auto one = SlowlyVaryingSpec::constant(1.0);
            std::vector<double> p_k(s.d_max + 1, 0.0), p_inf(s.d_max + 1, 0.0);
            for (std::size_t j = 1; j <= s.d_max; ++j) {
              std::vector<double> terms(k);
              for (std::size_t i = 1; i <= k; ++i) terms[i - 1] = std::pow(double(i), -2.0 * s.b * double(j));
              p_k[j] = pairwise_sum(terms);
              p_inf[j] = p_k[j] + series_tail_sum(k, 2.0 * s.b * double(j), one, 0.0);
            }
            const auto e_k = elementary_from_power(p_k, s.d_max);
            const auto e_inf = elementary_from_power(p_inf, s.d_max);
            double acc = 0.0;
            for (std::size_t d = 1; d <= s.d_max; ++d) {
              const double c = c_weight(s.gamma, d);
              acc += c * c * factorial(d) * (e_inf[d] - e_k[d]);
            }
            return acc;
          },
      },
      spec.kind);
}

double second_moment(const MartingaleSpec& spec, std::size_t n) {
  return std::visit(
      Overloaded{
          [&](const SimpleKind& s) {
            const auto w = weights(s.b, s.l0, n);
            std::vector<double> w2;
            for (std::size_t i = 2; i <= n; ++i) w2.push_back(w[i] * w[i]);
            return pairwise_sum(w2);
          },
          [&](const DoubleProductKind& s) {
            const auto w = weights(s.b, s.l0, n);
            std::vector<double> w2(n), w4(n);
            for (std::size_t i = 1; i <= n; ++i) {
              w2[i - 1] = w[i] * w[i];
              w4[i - 1] = w2[i - 1] * w2[i - 1];
            }
            const double t = pairwise_sum(w2);
            return t * t - pairwise_sum(w4);
          },
          [&](const YSeriesKind& s) {
            std::vector<double> p(s.d_max + 1, 0.0);
            for (std::size_t j = 1; j <= s.d_max; ++j) {
              std::vector<double> terms(n);
              for (std::size_t i = 1; i <= n; ++i) terms[i - 1] = std::pow(double(i), -2.0 * s.b * double(j));
              p[j] = pairwise_sum(terms);
            }
            const auto e = elementary_from_power(p, s.d_max);
            double acc = 0.0;
            for (std::size_t d = 1; d <= s.d_max; ++d) {
              const double c = c_weight(s.gamma, d);
              acc += c * c * factorial(d) * e[d];
            }
            return acc;
          },
      },
      spec.kind);
}

RResult r_function_detail(double delta, double p, const PsiSpec& psi) {
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::kValidation, "R needs delta > 0");
  require(p >= 2.0, ErrorKind::kValidation, "R needs p >= 2");
  const auto& cfg = default_config();
  const double alpha_max = cfg.beta_min / (cfg.beta_min - 1.0);
  require(psi.max_p() >= alpha_max * p, ErrorKind::kDomain,
          "psi is not evaluable at alpha p across the beta scan");
  const double log_delta = std::log(delta);
  auto objective = [&](double log_beta) {
    const double beta = std::exp(log_beta);
    const double alpha = beta / (beta - 1.0);
    const double q = p * beta;
    return (2.0 / (q + 2.0)) * log_delta + (q / (q + 2.0)) * psi.log_value(alpha * p);
  };
  const auto grid = log_spaced(cfg.beta_min, cfg.beta_max, cfg.beta_scan_points);
  std::size_t best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> lb(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lb[i] = std::log(grid[i]);
    const double v = objective(lb[i]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  RResult out{best, grid[best_i]};
  const double lo = lb[best_i == 0 ? 0 : best_i - 1];
  const double hi = lb[std::min(best_i + 1, grid.size() - 1)];
  const auto refined = golden_section_minimize(objective, lo, hi, cfg.golden_x_tol);
  if (refined.value < out.value) out = {refined.value, std::exp(refined.x)};
  // beta = 2 is always admissible; keeps R <= the closed-form value exactly.
  const double at_two = objective(std::log(2.0));
  if (at_two < out.value) out = {at_two, 2.0};
  out.value = std::exp(out.value);
  return out;
}

double r_function(double delta, double p, const PsiSpec& psi) {
  require(delta > 0.0 && delta < 1.0, ErrorKind::kValidation, "r_function needs delta in (0,1)");
  return r_function_detail(delta, p, psi).value;
}

double corollary1_bound(double delta, double p, const PsiSpec& psi) {
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::kValidation, "closed-form bound needs delta > 0");
  require(p >= 2.0, ErrorKind::kValidation, "closed-form bound needs p >= 2");
  return std::exp(std::log(delta) / (p + 1.0) + p / (p + 1.0) * psi.log_value(2.0 * p));
}

double theorem9_bound(double gamma_n, const PsiSpec& psi, const PsiSpec& nu, double k,
                      std::span<const double> p_grid, bool maximal) {
  require(gamma_n >= 0.0 && std::isfinite(gamma_n), ErrorKind::kValidation, "gamma_n must be finite and >= 0");
  require(k > 0.0 && std::isfinite(k), ErrorKind::kValidation, "K must be positive");
  require(!p_grid.empty(), ErrorKind::kValidation, "p-grid is empty");
  if (gamma_n == 0.0) return 0.0;
  const auto kpsi = psi.scaled(k);
  double sup = 0.0;
  for (double p : p_grid) sup = std::max(sup, r_function_detail(gamma_n, p, kpsi).value / nu(p));
  return (maximal ? 10.0 : 5.0) * std::numbers::sqrt2 * sup;
}

std::string_view to_string(ClassVerdict v) {
  switch (v) {
    case ClassVerdict::kHolds: return "holds";
    case ClassVerdict::kFails: return "fails";
    case ClassVerdict::kUndecided: return "undecided";
  }
  return "undecided";
}

DeltaClassReport delta2_nabla2_check(const NFunctionSpec& n_fn, std::span<const double> u_grid) {
  require(u_grid.size() >= 8, ErrorKind::kValidation, "u-grid needs at least 8 points");
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    require(u_grid[i] > 0.0, ErrorKind::kValidation, "u-grid must be positive");
    if (i > 0) require(u_grid[i] > u_grid[i - 1], ErrorKind::kValidation, "u-grid must increase");
  }
  DeltaClassReport rep;
  if (std::log(u_grid.back() / u_grid.front()) < std::log(16.0)) return rep;
  auto log_n = [&](double u) {
    const double v = n_fn.log_value(u);
    require(std::isfinite(v), ErrorKind::kValidation, "N is not evaluable on the scaled u-grid");
    return v;
  };
  const std::size_t n = u_grid.size(), half = n / 2;

  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = log_n(2.0 * u_grid[i]) - log_n(u_grid[i]);
  const double lo_max = *std::max_element(rho.begin(), rho.begin() + std::ptrdiff_t(half));
  const double hi_max = *std::max_element(rho.begin() + std::ptrdiff_t(half), rho.end());
  const bool growing = rho.back() > rho[(3 * n) / 4] + 1e-9 * std::abs(rho.back());
  if (hi_max > lo_max + std::log(2.0) && growing) {
    rep.delta2 = ClassVerdict::kFails;
  } else if (hi_max <= lo_max + 1e-9 * std::max(1.0, std::abs(lo_max))) {
    rep.delta2 = ClassVerdict::kHolds;
    rep.delta2_u0 = u_grid.front();
    rep.delta2_beta = std::exp(*std::max_element(rho.begin(), rho.end()));
  }

  bool any_end_ok = false;
  for (double l : {2.0, 3.0, 4.0, 8.0}) {
    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = log_n(l * u_grid[i]) - log_n(u_grid[i]) - std::log(2.0 * l);
    std::size_t i0 = n;
    while (i0 > 0 && sigma[i0 - 1] >= -1e-12) --i0;
    if (i0 < n) any_end_ok = true;
    if (i0 <= half) {
      rep.nabla2 = ClassVerdict::kHolds;
      rep.nabla2_u0 = u_grid[i0];
      rep.nabla2_l = l;
      break;
    }
  }
  if (rep.nabla2 != ClassVerdict::kHolds && !any_end_ok) rep.nabla2 = ClassVerdict::kFails;
  return rep;
}

double psi_doubling_constant(const PsiSpec& psi, std::span<const double> p_grid) {
  double c = 0.0;
  for (double p : p_grid) c = std::max(c, std::exp(psi.log_value(2.0 * p) - psi.log_value(p)));
  return c;
}

ConvergenceReport convergence_diagnostic(const PathCollection& paths, const PsiSpec& psi, const PsiSpec& nu,
                                         std::span<const std::size_t> checkpoints,
                                         std::span<const double> p_grid) {
  require(!paths.paths.empty(), ErrorKind::kValidation, "no paths to diagnose");
  require(!checkpoints.empty(), ErrorKind::kValidation, "no checkpoints");
  const std::size_t n_paths = paths.paths.size();
  ConvergenceReport rep;
  if (p_grid.empty()) {
    const double cap = default_config().reliability_cap_factor * std::log2(double(n_paths));
    rep.p_grid = log_spaced(2.0, std::clamp(cap, 4.0, 64.0), 24);
  } else {
    rep.p_grid.assign(p_grid.begin(), p_grid.end());
  }
  rep.wide_error = n_paths < 1000;

  std::vector<double> resid(n_paths), level(n_paths), peak(n_paths), sq(n_paths);
  for (std::size_t n : checkpoints) {
    const auto it = std::find(paths.times.begin(), paths.times.end(), n);
    require(it != paths.times.end(), ErrorKind::kValidation,
            "checkpoint " + std::to_string(n) + " was not recorded by the simulation");
    const auto j = std::size_t(it - paths.times.begin());
    for (std::size_t i = 0; i < n_paths; ++i) {
      const auto& path = paths.paths[i];
      level[i] = path.values[j];
      peak[i] = path.running_max[j];
      resid[i] = path.values[j] - path.limit_value;
      sq[i] = resid[i] * resid[i];
    }
    CheckpointReport row;
    row.n = n;
    row.gamma_n = std::sqrt(pairwise_sum(sq) / double(n_paths) + paths.tail_variance);
    row.empirical_norm = gpsi_norm(moment_curve(resid, rep.p_grid), nu).gpsi_norm;
    row.psi_norm = gpsi_norm(moment_curve(level, rep.p_grid), psi).gpsi_norm;
    row.maximal_psi_norm = gpsi_norm(moment_curve(peak, rep.p_grid), psi).gpsi_norm;
    rep.rows.push_back(row);
  }
  for (const auto& r : rep.rows) rep.k_estimate = std::max(rep.k_estimate, r.psi_norm);
  require(rep.k_estimate > 0.0, ErrorKind::kDegenerate, "all checkpoint norms are zero");
  const double eps_mc = 3.0 / std::sqrt(double(n_paths));
  for (auto& r : rep.rows) {
    r.bound = theorem9_bound(r.gamma_n, psi, nu, rep.k_estimate, rep.p_grid, false);
    r.bound_maximal = theorem9_bound(r.gamma_n, psi, nu, rep.k_estimate, rep.p_grid, true);
    if (r.maximal_psi_norm > 2.0 * r.psi_norm * (1.0 + eps_mc)) rep.doob_ok = false;
  }
  rep.order = essential_order(psi, nu, log_spaced(2.0, 256.0, 64));
  const double first = rep.rows.front().empirical_norm;
  rep.final_over_initial = first > 0.0 ? rep.rows.back().empirical_norm / first : 0.0;
  if (rep.final_over_initial < 0.1)
    rep.verdict = "converges";
  else if (rep.final_over_initial >= 0.3)
    rep.verdict = "plateaus";
  else
    rep.verdict = "undetermined";
  return rep;
}

}  // namespace orlicz
