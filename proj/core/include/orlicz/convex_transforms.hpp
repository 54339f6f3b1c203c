#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "orlicz/grid_function.hpp"
#include "orlicz/psi_spec.hpp"

namespace orlicz {

struct ConjugateResult {
  GridFunction conjugate;
  std::vector<std::size_t> maximizer;  // index into the primal grid, per dual point
  std::vector<double> maximizer_z;
};

// g(p) = max_z (p z - f(z)) over the grid of f, with linear extension along
// finite slopes. Throws kTruncatedDomain when the sup is not resolved.
ConjugateResult fenchel_conjugate(const GridFunction& f, std::span<const double> dual_grid);
double conjugate_value(const GridFunction& f, double p);

// Grid-backed psi with p log psi(p) = W*(p).
PsiSpec psi_from_w(const GridFunction& w, std::span<const double> p_grid);

// W = (p log psi(p))* on z_grid, sup taken over p_grid.
GridFunction w_from_psi(const PsiSpec& psi, std::span<const double> z_grid,
                        std::span<const double> p_grid);
// p_grid defaults to the psi's own grid (grid-backed) or the configured log grid.
GridFunction w_from_psi(const PsiSpec& psi, std::span<const double> z_grid);

// N(u) = exp(W(log|u|)) for |u| >= e^2 and C u^2 below, C = exp(W(2)) / e^4.
class NFunctionSpec {
 public:
  static NFunctionSpec from_w(GridFunction w);
  // Pure quadratic c u^2 on the whole line.
  static NFunctionSpec quadratic(double c);

  double log_value(double u) const;  // -inf at 0; +inf past the tabulated W window
  double operator()(double u) const;

  const GridFunction* w() const { return has_w_ ? &w_ : nullptr; }
  double quad_coeff() const { return quad_coeff_; }
  double splice_u() const { return splice_u_; }
  // Result of the convexity test on a u-grid; the continuity patch can kink
  // downward at the splice when W'(2) < 2.
  bool convex() const { return convex_; }
  std::string name() const;

 private:
  NFunctionSpec() = default;
  GridFunction w_;
  bool has_w_ = false;
  double quad_coeff_ = 1.0;
  double log_quad_coeff_ = 0.0;
  double splice_u_ = 0.0;
  bool convex_ = true;
};

NFunctionSpec n_from_w(const GridFunction& w);

// sup over interior nodes of |f - f**|, with f** built from exact discrete
// conjugates (dual grid = slopes of the lower hull of f).
double biconjugate_residual(const GridFunction& f);

}  // namespace orlicz
