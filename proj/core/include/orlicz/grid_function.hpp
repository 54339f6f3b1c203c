#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "orlicz/config.hpp"

namespace orlicz {

// An infinite extrapolation slope marks a domain end: evaluation past it is a
// domain error, and a conjugate maximizer sitting on a right domain end is
// unresolved.
inline constexpr double kDomainEnd = std::numeric_limits<double>::infinity();

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> grid, std::vector<double> values, double left_slope = kDomainEnd,
               double right_slope = kDomainEnd, bool convex = false);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  bool convex() const { return convex_; }
  std::size_t size() const { return grid_.size(); }
  double front() const { return grid_.front(); }
  double back() const { return grid_.back(); }

  // Piecewise-linear interpolation, linear extension with finite slopes.
  double operator()(double x) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  double left_slope_ = kDomainEnd;
  double right_slope_ = kDomainEnd;
  bool convex_ = false;
};

GridFunction tabulate(const std::function<double(double)>& f, std::vector<double> grid,
                      double left_slope = kDomainEnd, double right_slope = kDomainEnd);

// f_j may exceed the chord through its neighbours by eps_rel * max(1, max|f|).
bool is_convex(const GridFunction& f, double eps_rel = default_config().convex_eps_rel);
bool is_nondecreasing(const GridFunction& f, double eps_rel = default_config().convex_eps_rel);

// Largest chord violation, in absolute units.
double convexity_defect(const GridFunction& f);

}  // namespace orlicz
