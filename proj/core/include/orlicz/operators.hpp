#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "orlicz/norms.hpp"

namespace orlicz {

// f sampled at M equispaced points of [0,1); M a power of two, M >= 8.
class GridSignal {
 public:
  explicit GridSignal(std::vector<double> values);
  static GridSignal tabulate_midpoints(std::size_t m, const std::function<double(double)>& f);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const;

 private:
  std::vector<double> values_;
};

// Real trigonometric projection onto frequencies |k| <= N. N >= M/2 aliases.
GridSignal fourier_partial_sum(const GridSignal& f, std::size_t n);
// Multiplier -i sign(k); the zero and Nyquist bins map to 0.
GridSignal hilbert_transform(const GridSignal& f);

// |f|_2^2 = sum_k |c_k|^2, returned as the relative defect.
double parseval_defect(const GridSignal& f);
// |Hf|_2^2 against |f|_2^2 - mean^2 - nyquist^2, relative to |f|_2^2.
double hilbert_isometry_defect(const GridSignal& f);

double gm_value(double m, double x);  // |log x|^{1/m}
// g_m at the cell midpoints (j + 1/2)/M.
GridSignal gm_signal(double m, std::size_t M);

struct GrowthFit {
  double a = 0.0;        // fitted exponent of sup_N |S_N f|_p / |f|_p in p
  double c = 0.0;        // fitted constant
  double b = 1.0;
  double d = 1.0;
  double single_c = 0.0; // max_p ratio(p) / p: one constant valid on the whole grid
  std::vector<double> p;
  std::vector<double> ratio;
  std::vector<double> residuals;
};

GrowthFit riesz_growth_fit(const GridSignal& f, std::span<const double> p_grid,
                           std::span<const std::size_t> n_set);

// n = m / (a m + b d)
double transfer_index(double m, double a, double b, double d);

struct Lemma1Report {
  double m = 1.0;
  std::size_t grid = 0;
  double x_lo = 0.0;
  double x_hi = 1e-3;
  double band = 0.0;           // max/min of |H g_m| / (|log x|^{(m+1)/m} + 1) on [x_lo, x_hi]
  double band_refined = 0.0;   // same at 2M
  double tail_slope = 0.0;     // level-set tail exponent of |H g_m|
  double tail_slope_refined = 0.0;
  double tail_stderr = 0.0;
  double gm_tail_slope = 0.0;  // g_m itself, for reference
  TailFit tail_fit;
  bool unresolved = false;     // band or slope moved more than 20% under M -> 2M
};

Lemma1Report lemma1_experiment(double m, std::size_t M);

struct NonconvergenceReport {
  double m = 1.0;
  std::size_t grid = 0;
  std::vector<std::size_t> n_set;
  std::vector<double> gpsi_residual;  // |S_N g - g| in G(psi_{m,0}) over p_grid
  std::vector<double> l2_residual;
  std::vector<double> p_grid;
};

NonconvergenceReport nonconvergence_experiment(double m, std::size_t M, std::span<const std::size_t> n_set,
                                               std::span<const double> p_grid);

}  // namespace orlicz
