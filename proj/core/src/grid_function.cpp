#include "orlicz/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/error.hpp"

namespace orlicz {

namespace {

double value_scale(const std::vector<double>& v) {
  double s = 1.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

GridFunction::GridFunction(std::vector<double> grid, std::vector<double> values, double left_slope,
                           double right_slope, bool convex)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  require(grid_.size() >= 2, ErrorKind::kValidation, "grid function needs at least two points");
  require(grid_.size() == values_.size(), ErrorKind::kValidation, "grid/value length mismatch");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    require(std::isfinite(grid_[i]), ErrorKind::kValidation, "non-finite abscissa");
    require(std::isfinite(values_[i]), ErrorKind::kValidation, "non-finite ordinate");
    if (i > 0)
      require(grid_[i] > grid_[i - 1], ErrorKind::kValidation, "grid must be strictly increasing");
  }
  require(!std::isnan(left_slope_) && !std::isnan(right_slope_), ErrorKind::kValidation,
          "slopes must not be NaN");
  if (convex) {
    require(is_convex(*this), ErrorKind::kValidation, "function flagged convex fails the chord test");
    convex_ = true;
  }
}

double GridFunction::operator()(double x) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  if (x < grid_.front()) {
    if (std::isfinite(left_slope_)) return values_.front() + left_slope_ * (x - grid_.front());
    require(grid_.front() - x <= tol, ErrorKind::kDomain, "argument left of the grid domain");
    return values_.front();
  }
  if (x > grid_.back()) {
    if (std::isfinite(right_slope_)) return values_.back() + right_slope_ * (x - grid_.back());
    require(x - grid_.back() <= tol, ErrorKind::kDomain, "argument right of the grid domain");
    return values_.back();
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return values_.back();
  const std::size_t j = std::size_t(it - grid_.begin());
  const double x0 = grid_[j - 1], x1 = grid_[j];
  const double t = (x - x0) / (x1 - x0);
  return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

GridFunction tabulate(const std::function<double(double)>& f, std::vector<double> grid,
                      double left_slope, double right_slope) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
  return GridFunction(std::move(grid), std::move(values), left_slope, right_slope);
}

double convexity_defect(const GridFunction& f) {
  const auto& z = f.grid();
  const auto& v = f.values();
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < z.size(); ++j) {
    const double t = (z[j] - z[j - 1]) / (z[j + 1] - z[j - 1]);
    const double chord = v[j - 1] + t * (v[j + 1] - v[j - 1]);
    worst = std::max(worst, v[j] - chord);
  }
  return worst;
}

bool is_convex(const GridFunction& f, double eps_rel) {
  return convexity_defect(f) <= eps_rel * value_scale(f.values());
}

bool is_nondecreasing(const GridFunction& f, double eps_rel) {
  const auto& v = f.values();
  const double eps = eps_rel * value_scale(v);
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] < v[j - 1] - eps) return false;
  return true;
}

}  // namespace orlicz
