#include "orlicz/convex_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Indices of the lower convex hull of (z_i, f_i), z strictly increasing.
std::vector<std::size_t> lower_hull(std::span<const double> z, std::span<const double> f) {
  std::vector<std::size_t> h;
  h.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    while (h.size() >= 2) {
      const std::size_t a = h[h.size() - 2], b = h.back();
      const double s_ab = (f[b] - f[a]) / (z[b] - z[a]);
      const double s_bi = (f[i] - f[b]) / (z[i] - z[b]);
      if (s_ab >= s_bi)
        h.pop_back();
      else
        break;
    }
    h.push_back(i);
  }
  return h;
}

struct RawConjugate {
  std::vector<double> value;
  std::vector<std::size_t> arg;
};

// max_i (p z_i - f_i) for increasing p; the argmax is nondecreasing in p on
// the hull, so one forward pointer suffices.
RawConjugate raw_conjugate(std::span<const double> z, std::span<const double> f,
                           std::span<const double> dual) {
  const auto hull = lower_hull(z, f);
  RawConjugate out;
  out.value.resize(dual.size());
  out.arg.resize(dual.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < dual.size(); ++j) {
    const double p = dual[j];
    while (k + 1 < hull.size() &&
           p * z[hull[k + 1]] - f[hull[k + 1]] > p * z[hull[k]] - f[hull[k]])
      ++k;
    out.arg[j] = hull[k];
    out.value[j] = p * z[hull[k]] - f[hull[k]];
  }
  return out;
}

void require_increasing(std::span<const double> xs, const char* what) {
  require(!xs.empty(), ErrorKind::kValidation, std::string(what) + " is empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(xs[i]), ErrorKind::kValidation, std::string(what) + " has a non-finite entry");
    if (i > 0)
      require(xs[i] > xs[i - 1], ErrorKind::kValidation,
              std::string(what) + " must be strictly increasing");
  }
}

}  // namespace

namespace {

// Conjugate with the boundary checks that decide whether the sup is resolved.
RawConjugate resolved_conjugate(const GridFunction& f, std::span<const double> dual) {
  require_increasing(dual, "dual grid");
  const auto& z = f.grid();
  auto raw = raw_conjugate(z, f.values(), dual);
  const std::size_t last = z.size() - 1;
  for (std::size_t j = 0; j < dual.size(); ++j) {
    const double p = dual[j];
    if (std::isfinite(f.left_slope()) && p < f.left_slope()) {
      std::ostringstream os;
      os << "conjugate unbounded at p=" << p << " (below the left extension slope)";
      fail(ErrorKind::kTruncatedDomain, os.str());
    }
    if (std::isfinite(f.right_slope()) ? p > f.right_slope() : raw.arg[j] == last) {
      std::ostringstream os;
      os << "sup at p=" << p << " is not resolved by the grid (maximizer at z=" << z.back() << ")";
      fail(ErrorKind::kTruncatedDomain, os.str());
    }
  }
  return raw;
}

}  // namespace

ConjugateResult fenchel_conjugate(const GridFunction& f, std::span<const double> dual_grid) {
  require(dual_grid.size() >= 2, ErrorKind::kValidation, "dual grid needs at least two points");
  auto raw = resolved_conjugate(f, dual_grid);
  ConjugateResult out;
  out.maximizer_z.resize(dual_grid.size());
  for (std::size_t j = 0; j < dual_grid.size(); ++j) out.maximizer_z[j] = f.grid()[raw.arg[j]];
  out.maximizer = std::move(raw.arg);
  out.conjugate = GridFunction(std::vector<double>(dual_grid.begin(), dual_grid.end()),
                               std::move(raw.value), kDomainEnd, kDomainEnd, true);
  return out;
}

double conjugate_value(const GridFunction& f, double p) {
  const double dual[1] = {p};
  return resolved_conjugate(f, dual).value[0];
}

PsiSpec psi_from_w(const GridFunction& w, std::span<const double> p_grid) {
  require(p_grid.size() >= 2 && p_grid.front() >= 2.0 - 1e-12 && p_grid.front() <= 2.0 + 1e-12,
          ErrorKind::kValidation, "psi p-grid must start at 2 and hold at least two points");
  auto conj = fenchel_conjugate(w, p_grid);
  const std::vector<double> p(p_grid.begin(), p_grid.end());
  return PsiSpec::grid_backed(GridFunction(p, conj.conjugate.values(), kDomainEnd, kDomainEnd));
}

GridFunction w_from_psi(const PsiSpec& psi, std::span<const double> z_grid,
                        std::span<const double> p_grid) {
  require_increasing(p_grid, "p-grid");
  require(p_grid.size() >= 2 && p_grid.front() >= 2.0 - 1e-12, ErrorKind::kValidation,
          "p-grid must lie in [2, inf) with at least two points");
  require_increasing(z_grid, "z-grid");
  std::vector<double> p(p_grid.begin(), p_grid.end());
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = p[i] * psi.log_value(p[i]);
  GridFunction curve(std::move(p), std::move(g), kDomainEnd, kDomainEnd);
  require(is_nondecreasing(curve), ErrorKind::kValidation,
          "p log psi(p) is not nondecreasing on the p-grid");
  require(is_convex(curve), ErrorKind::kValidation, "p log psi(p) is not convex on the p-grid");
  auto conj = fenchel_conjugate(curve, z_grid);
  return conj.conjugate;
}

GridFunction w_from_psi(const PsiSpec& psi, std::span<const double> z_grid) {
  if (const auto* g = std::get_if<GridPsi>(&psi.kind())) {
    const auto& grid = g->p_log_psi.grid();
    auto first = std::lower_bound(grid.begin(), grid.end(), 2.0 - 1e-12);
    const std::vector<double> p(first, grid.end());
    return w_from_psi(psi, z_grid, p);
  }
  const auto& cfg = default_config();
  const auto p = log_spaced(cfg.p_min, cfg.p_max, cfg.grid_points);
  return w_from_psi(psi, z_grid, p);
}

NFunctionSpec NFunctionSpec::from_w(GridFunction w) {
  require(w.front() <= 2.0 + 1e-12, ErrorKind::kValidation, "W must be tabulated from z <= 2");
  require(w.back() > 2.0, ErrorKind::kValidation, "W window must extend beyond z = 2");
  NFunctionSpec n;
  n.splice_u_ = std::exp(2.0);
  n.log_quad_coeff_ = w(2.0) - 4.0;
  n.quad_coeff_ = std::exp(n.log_quad_coeff_);
  n.w_ = std::move(w);
  n.has_w_ = true;

  // Chord test in log-space on a u-grid that straddles the splice.
  const double z_hi = std::min(n.w_.back(), 40.0);
  auto u = log_spaced(1e-2, std::exp(z_hi), 2048);
  u.push_back(n.splice_u_);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  std::vector<double> lv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) lv[i] = n.log_value(u[i]);
  for (std::size_t j = 1; j + 1 < u.size() && n.convex_; ++j) {
    const double t = (u[j] - u[j - 1]) / (u[j + 1] - u[j - 1]);
    // N_j <= (1-t) N_{j-1} + t N_{j+1}, everything relative to N_{j+1}.
    const double lhs = std::exp(lv[j] - lv[j + 1]);
    const double rhs = (1.0 - t) * std::exp(lv[j - 1] - lv[j + 1]) + t;
    if (lhs > rhs * (1.0 + 1e-9)) n.convex_ = false;
    if (lv[j] < lv[j - 1] - 1e-12 * std::abs(lv[j - 1])) n.convex_ = false;
  }
  return n;
}

NFunctionSpec NFunctionSpec::quadratic(double c) {
  require(c > 0.0 && std::isfinite(c), ErrorKind::kValidation, "quadratic coefficient must be positive");
  NFunctionSpec n;
  n.quad_coeff_ = c;
  n.log_quad_coeff_ = std::log(c);
  n.splice_u_ = kInf;
  return n;
}

double NFunctionSpec::log_value(double u) const {
  u = std::abs(u);
  if (u == 0.0) return -kInf;
  if (u < splice_u_) return log_quad_coeff_ + 2.0 * std::log(u);
  const double z = std::log(u);
  if (z > w_.back() && !std::isfinite(w_.right_slope())) return kInf;
  return w_(z);
}

double NFunctionSpec::operator()(double u) const { return std::exp(log_value(u)); }

std::string NFunctionSpec::name() const {
  std::ostringstream os;
  if (has_w_)
    os << "N(W[" << w_.size() << " pts on " << w_.front() << ".." << w_.back() << "])";
  else
    os << "N(" << quad_coeff_ << "*u^2)";
  return os.str();
}

NFunctionSpec n_from_w(const GridFunction& w) { return NFunctionSpec::from_w(w); }

double biconjugate_residual(const GridFunction& f) {
  const auto& z = f.grid();
  const auto& v = f.values();
  const auto hull = lower_hull(z, v);
  if (hull.size() < 2) return 0.0;
  std::vector<double> slopes(hull.size() - 1);
  for (std::size_t e = 0; e + 1 < hull.size(); ++e)
    slopes[e] = (v[hull[e + 1]] - v[hull[e]]) / (z[hull[e + 1]] - z[hull[e]]);
  // Hull slopes are strictly increasing by construction.
  const auto star = raw_conjugate(z, v, slopes);
  const auto star_star = raw_conjugate(slopes, star.value, z);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < z.size(); ++i)
    worst = std::max(worst, std::abs(v[i] - star_star.value[i]));
  return worst;
}

}  // namespace orlicz
