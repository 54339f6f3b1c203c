#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz/convex_transforms.hpp"
#include "orlicz/psi_spec.hpp"
#include "orlicz/sample.hpp"

namespace orlicz {

// (mean |x|^p)^{1/p}, with the sample maximum factored out.
double lp_norm(std::span<const double> xs, double p);
double lp_norm(const Sample& s, double p);

struct MomentCurve {
  std::vector<double> p_grid;
  std::vector<double> lp_values;
  std::vector<double> ess;      // (sum w)^2 / sum w^2 with w = (|x|/max|x|)^p
  std::vector<bool> reliable;   // p <= cap and ess >= ess_min
  std::size_t n = 0;
  double cap = 0.0;             // reliability_cap_factor * log2(n)
  bool above_cap = false;       // some requested p exceeds the cap
};

MomentCurve moment_curve(std::span<const double> xs, std::span<const double> p_grid);
MomentCurve moment_curve(const Sample& s, std::span<const double> p_grid);

struct TailFit {
  std::string model;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double u_lo = 0.0;
  double u_hi = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  std::size_t points = 0;
  std::vector<double> u;      // fitted abscissas (before the log transform)
  std::vector<double> tail;   // empirical P(|X| > u) at those points
};

struct NormReport {
  double gpsi_norm = 0.0;
  double argmax_p = 0.0;
  std::string psi;
  std::optional<double> luxemburg_norm;
  std::optional<TailFit> tail_fit;
};

NormReport gpsi_norm(const MomentCurve& curve, const PsiSpec& psi);

// inf_{v>0} v^{-1} (1 + mean N(v x_i)), minimised over t = log v.
double luxemburg_norm(std::span<const double> xs, const NFunctionSpec& n_fn);
double luxemburg_norm(const Sample& s, const NFunctionSpec& n_fn);

enum class TrendVerdict { kDecreasing, kPlateau, kGrowing, kInconclusive };
std::string_view to_string(TrendVerdict v);

struct TrendReport {
  TrendVerdict verdict = TrendVerdict::kInconclusive;
  std::vector<double> p;
  std::vector<double> ratio;     // |eta|_p / psi(p) (or the family envelope)
  std::vector<bool> used;        // points entering the fit
  double slope = 0.0;            // power-law exponent b of the ratio
  std::size_t points = 0;
};

// Fits log ratio = a + b log p + c log(p)/p + d/p over the reliable points; the
// last two terms absorb the finite-p Stirling corrections of Gamma-type
// moments, so b is the asymptotic power. |b| <= plateau_slope is a plateau.
TrendReport classify_trend(std::span<const double> p, std::span<const double> ratio,
                           const std::vector<bool>& reliable);

TrendReport g0_membership(const MomentCurve& curve, const PsiSpec& psi);
TrendReport ucn_diagnostic(std::span<const MomentCurve> curves, const PsiSpec& psi);

enum class TailModel { kWeibull, kLogLog };
std::string_view to_string(TailModel m);

// Regresses log(-log P(|X|>u)) on log u (weibull) or log log u (loglog) over the
// quantile window [q_lo, q_hi] with plotting positions (r - 0.5)/n.
TailFit tail_exponent_fit(std::span<const double> xs, TailModel model, double q_lo, double q_hi);
TailFit tail_exponent_fit(std::span<const double> xs, TailModel model = TailModel::kWeibull);
TailFit tail_exponent_fit(const Sample& s, TailModel model = TailModel::kWeibull);

}  // namespace orlicz
