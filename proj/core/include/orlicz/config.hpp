#pragma once

#include <cstddef>

namespace orlicz {

// Every tolerance and default window used by the library lives here.
struct NumericConfig {
  // Grids.
  std::size_t grid_points = 4096;
  double p_min = 2.0;
  double p_max = 256.0;

  // Convexity checks: f_j may exceed the chord of its neighbours by at most
  // convex_eps_rel * max(1, max|f|).
  double convex_eps_rel = 1e-9;

  // Moment curves. Points with p above 2*log2(n) are flagged; points whose
  // effective sample size falls below ess_min are excluded from trend fits.
  double reliability_cap_factor = 2.0;
  double ess_min = 1000.0;
  double lyapunov_tol_rel = 1e-12;

  // Trend classification of log(|eta|_p / psi(p)).
  double plateau_slope = 0.15;
  std::size_t trend_min_points = 8;
  double trend_min_p_ratio = 2.0;

  // Essential ordering of two psi functions (deterministic curves).
  double comparable_slope = 0.05;
  double comparable_band = 10.0;

  // Tail fits.
  double fit_q_lo = 1e-5;
  double fit_q_hi = 1e-2;
  std::size_t fit_min_points = 8;
  std::size_t fit_max_points = 64;

  // Generators.
  double inversion_tol = 1e-12;

  // R-function scan.
  double beta_min = 1.0 + 1e-3;
  double beta_max = 1e3;
  std::size_t beta_scan_points = 512;
  double golden_x_tol = 1e-12;
};

const NumericConfig& default_config();

}  // namespace orlicz
