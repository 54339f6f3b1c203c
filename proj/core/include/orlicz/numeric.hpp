#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace orlicz {

// Pairwise (cascade) summation in index order; result is independent of any
// caller-side chunking.
double pairwise_sum(std::span<const double> xs);

// log(sum(exp(xs))) with -inf entries ignored; returns -inf for an empty or
// all -inf input.
double log_sum_exp(std::span<const double> xs);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);
std::vector<double> linear_spaced(double lo, double hi, std::size_t n);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Least-squares coefficients for y ~ sum_j beta_j * columns[j].
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> y);

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
};

MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                       double hi, double x_tol, int max_iter = 400);

std::size_t worker_count();

// Runs fn(begin, end) over [0, n) in contiguous chunks of at most `grain`
// items. Chunks are disjoint, so results written by index do not depend on
// the number of workers.
template <class Fn>
void parallel_for(std::size_t n, std::size_t grain, Fn&& fn) {
  if (n == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t chunks = (n + grain - 1) / grain;
  const std::size_t workers = std::min(worker_count(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c * grain, std::min(n, (c + 1) * grain));
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) fn(c * grain, std::min(n, (c + 1) * grain));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace orlicz
