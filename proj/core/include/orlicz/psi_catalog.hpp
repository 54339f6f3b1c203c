#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "orlicz/psi_spec.hpp"
#include "orlicz/slowly_varying.hpp"

namespace orlicz {

double psi_eval(const PsiSpec& spec, double p);

// log of the closed-form tail bound attached to the space:
//   MR(m,r):    -x^m (log x)^{-m r}
//   ZBeta:      -Z^{-1/beta} (1+beta)^{1+1/beta} (log x)^{1+1/beta}
//   GridBacked: -W(log x), W recomputed as the conjugate of p log psi(p)
// Valid for x >= e^2.
double log_tail_profile(const PsiSpec& spec, double x);
double tail_profile(const PsiSpec& spec, double x);

// |L(u / L(u)) / L(u) - 1| per grid point.
std::vector<double> slowly_varying_residual(const SlowlyVaryingSpec& l, std::span<const double> u_grid);

enum class OrderVerdict { kDominated, kComparable, kDominating, kInconclusive };
std::string_view to_string(OrderVerdict v);

struct OrderReport {
  OrderVerdict verdict = OrderVerdict::kInconclusive;
  std::vector<double> p;
  std::vector<double> ratio;  // psi(p) / nu(p)
  double slope = 0.0;         // d log ratio / d log p over the upper half of the grid
  double band = 1.0;          // max/min of the ratio over the upper half
};

// Trend of psi/nu: dominated when the ratio decays (psi << nu), dominating when
// it grows, comparable when flat with a bounded band.
OrderReport essential_order(const PsiSpec& psi, const PsiSpec& nu, std::span<const double> p_grid);

}  // namespace orlicz
