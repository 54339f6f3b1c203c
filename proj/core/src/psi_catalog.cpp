#include "orlicz/psi_catalog.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/config.hpp"
#include "orlicz/convex_transforms.hpp"
#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

double psi_eval(const PsiSpec& spec, double p) {
  require(p >= 2.0, ErrorKind::kDomain, "psi_eval needs p >= 2");
  return spec(p);
}

double log_tail_profile(const PsiSpec& spec, double x) {
  require(x >= std::exp(2.0) * (1.0 - 1e-12), ErrorKind::kDomain,
          "tail profile closed form applies for x >= e^2");
  const double lx = std::log(x);
  double out = 0.0;
  if (const auto* mr = std::get_if<MrPsi>(&spec.kind())) {
    out = -std::exp(mr->m * lx - mr->m * mr->r * std::log(lx));
  } else if (const auto* zb = std::get_if<ZBetaPsi>(&spec.kind())) {
    const double e = 1.0 + 1.0 / zb->beta;
    out = -std::pow(zb->z, -1.0 / zb->beta) * std::pow(1.0 + zb->beta, e) * std::pow(lx, e);
  } else {
    const auto& g = std::get<GridPsi>(spec.kind()).p_log_psi;
    const double log_k = std::log(spec.factor());
    // (g + p log k)*(z) = g*(z - log k)
    return -conjugate_value(g, lx - log_k);
  }
  // Scaling psi by k rescales x by k in the tail.
  if (spec.factor() != 1.0) return log_tail_profile(spec.scaled(1.0 / spec.factor()), x / spec.factor());
  return out;
}

double tail_profile(const PsiSpec& spec, double x) { return std::exp(log_tail_profile(spec, x)); }

std::vector<double> slowly_varying_residual(const SlowlyVaryingSpec& l, std::span<const double> u_grid) {
  std::vector<double> out(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const double u = u_grid[i];
    require(u >= 2.0, ErrorKind::kDomain, "residual grid must lie in [2, inf)");
    if (i > 0) require(u > u_grid[i - 1], ErrorKind::kValidation, "u-grid must be increasing");
    const double lu = l.log_value(u);
    const double shifted = u * std::exp(-lu);
    out[i] = std::abs(std::expm1(l.log_value(shifted) - lu));
  }
  return out;
}

std::string_view to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::kDominated: return "dominated";
    case OrderVerdict::kComparable: return "comparable";
    case OrderVerdict::kDominating: return "dominating";
    case OrderVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

OrderReport essential_order(const PsiSpec& psi, const PsiSpec& nu, std::span<const double> p_grid) {
  require(p_grid.size() >= 4, ErrorKind::kValidation, "essential_order needs at least 4 grid points");
  const auto& cfg = default_config();
  OrderReport rep;
  rep.p.assign(p_grid.begin(), p_grid.end());
  rep.ratio.resize(p_grid.size());
  std::vector<double> lp, lr;
  const std::size_t half = p_grid.size() / 2;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double l = psi.log_value(p_grid[i]) - nu.log_value(p_grid[i]);
    rep.ratio[i] = std::exp(l);
    if (i >= half) {
      lp.push_back(std::log(p_grid[i]));
      lr.push_back(l);
    }
  }
  const auto fit = fit_line(lp, lr);
  rep.slope = fit.slope;
  const auto [lo, hi] = std::minmax_element(lr.begin(), lr.end());
  rep.band = std::exp(*hi - *lo);

  // A trend that does not dominate its own fluctuations is not classified.
  double max_resid = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i)
    max_resid = std::max(max_resid, std::abs(lr[i] - fit.intercept - fit.slope * lp[i]));
  const double explained = std::abs(fit.slope) * (lp.back() - lp.front());

  if (fit.slope < -cfg.comparable_slope)
    rep.verdict = max_resid > explained ? OrderVerdict::kInconclusive : OrderVerdict::kDominated;
  else if (fit.slope > cfg.comparable_slope)
    rep.verdict = max_resid > explained ? OrderVerdict::kInconclusive : OrderVerdict::kDominating;
  else
    rep.verdict = rep.band <= cfg.comparable_band ? OrderVerdict::kComparable : OrderVerdict::kInconclusive;
  return rep;
}

}  // namespace orlicz
