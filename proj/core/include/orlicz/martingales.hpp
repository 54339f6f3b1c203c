#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/convex_transforms.hpp"
#include "orlicz/psi_catalog.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/slowly_varying.hpp"

namespace orlicz {

// S_n = sum_{k=2}^{n} k^{-B} L0(k) eps(k)
struct SimpleKind {
  double b = 0.75;
  SlowlyVaryingSpec l0;
};

// S2_n = sum_{i != j <= n} w_i w_j eps(i,1) eps(j,2), w_i = i^{-B} L0(i)
struct DoubleProductKind {
  double b = 0.75;
  SlowlyVaryingSpec l0;
};

// Y_n = sum_{d=1}^{d_max} d^{-d gamma} Y(d,n); Y(d,n) sums over ordered tuples
// of distinct indices <= n of prod_i eps(k_i,i,d) k_i^{-B}.
struct YSeriesKind {
  double b = 0.75;
  double gamma = 1.0;
  std::size_t d_max = 6;
};

struct MartingaleSpec {
  std::variant<SimpleKind, DoubleProductKind, YSeriesKind> kind;
  std::size_t n_max = 1024;
  std::size_t truncation = 0;  // K >= n_max for the limit variable; 0 means K = n_max
  double max_work = 0.0;       // path-steps budget (cost-weighted); 0 means unlimited

  std::size_t k() const { return truncation == 0 ? n_max : truncation; }
  void validate() const;
  std::string name() const;
};

// Rademacher sign eps(index) of sequence `sequence` on path `path`.
int martingale_sign(const SeedSpec& seed, std::uint64_t path, std::uint64_t index, std::uint64_t sequence);

struct MartingalePath {
  std::vector<double> values;       // S_t at the collection's recorded times
  std::vector<double> running_max;  // max_{l <= t} |S_l|
  double limit_value = 0.0;         // S at truncation K
};

struct PathCollection {
  MartingaleSpec spec;
  SeedSpec seed;
  std::vector<std::size_t> times;
  std::vector<MartingalePath> paths;
  std::size_t horizon = 0;      // last simulated index (n_max unless cut by the budget)
  std::size_t truncation = 0;   // index at which the limit was taken
  bool partial = false;         // budget cut the horizon
  double tail_variance = 0.0;   // E(S_inf - S_K)^2
};

// times empty means every index 1..n_max.
PathCollection simulate(const MartingaleSpec& spec, std::size_t n_paths, const SeedSpec& seed,
                        std::span<const std::size_t> times = {});

// E(S_inf - S_K)^2 for the configured kind.
double tail_variance(const MartingaleSpec& spec, std::size_t k);
// E S_n^2 in closed form.
double second_moment(const MartingaleSpec& spec, std::size_t n);

struct RResult {
  double value = 0.0;
  double beta = 0.0;
};

// inf_{beta>1} delta^{2/(p beta+2)} psi(alpha p)^{p beta/(p beta+2)}, alpha = beta/(beta-1).
RResult r_function_detail(double delta, double p, const PsiSpec& psi);
double r_function(double delta, double p, const PsiSpec& psi);
double corollary1_bound(double delta, double p, const PsiSpec& psi);

// 5 sqrt(2) max_p R(gamma_n, p, K psi)/nu(p); 10 sqrt(2) for the maximal variant.
double theorem9_bound(double gamma_n, const PsiSpec& psi, const PsiSpec& nu, double k,
                      std::span<const double> p_grid, bool maximal = false);

enum class ClassVerdict { kHolds, kFails, kUndecided };
std::string_view to_string(ClassVerdict v);

struct DeltaClassReport {
  ClassVerdict delta2 = ClassVerdict::kUndecided;
  double delta2_u0 = 0.0;
  double delta2_beta = 0.0;
  ClassVerdict nabla2 = ClassVerdict::kUndecided;
  double nabla2_u0 = 0.0;
  double nabla2_l = 0.0;
};

DeltaClassReport delta2_nabla2_check(const NFunctionSpec& n_fn, std::span<const double> u_grid);

// max over the grid of psi(2p)/psi(p); reported only.
double psi_doubling_constant(const PsiSpec& psi, std::span<const double> p_grid);

struct CheckpointReport {
  std::size_t n = 0;
  double gamma_n = 0.0;
  double empirical_norm = 0.0;  // |S_n - S| in G(nu)
  double bound = 0.0;
  double bound_maximal = 0.0;
  double psi_norm = 0.0;        // |S_n| in G(psi)
  double maximal_psi_norm = 0.0;  // |max_{l<=n} |S_l|| in G(psi)
};

struct ConvergenceReport {
  std::vector<CheckpointReport> rows;
  std::vector<double> p_grid;
  double k_estimate = 0.0;
  OrderReport order;
  double final_over_initial = 0.0;
  std::string verdict;     // converges | plateaus | undetermined
  bool wide_error = false; // fewer than 1000 paths
  bool doob_ok = true;
};

ConvergenceReport convergence_diagnostic(const PathCollection& paths, const PsiSpec& psi, const PsiSpec& nu,
                                         std::span<const std::size_t> checkpoints,
                                         std::span<const double> p_grid = {});

}  // namespace orlicz
