#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "orlicz/error.hpp"

namespace orlicz::detail {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct Buffer {
  explicit Buffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) fail(ErrorKind::kBudget, "fftw_malloc failed");
  }
  ~Buffer() { fftw_free(ptr); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  void* ptr;
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t m = x.size();
  Buffer in(sizeof(double) * m), out(sizeof(fftw_complex) * (m / 2 + 1));
  auto* rin = static_cast<double*>(in.ptr);
  auto* cout = static_cast<fftw_complex*>(out.ptr);
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(int(m), rin, cout, FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), rin);
  fftw_execute(plan);
  std::vector<std::complex<double>> res(m / 2 + 1);
  for (std::size_t k = 0; k < res.size(); ++k) res[k] = {cout[k][0], cout[k][1]};
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return res;
}

std::vector<double> irfft(std::span<const std::complex<double>> c, std::size_t m) {
  require(c.size() == m / 2 + 1, ErrorKind::kValidation, "irfft: spectrum length mismatch");
  Buffer in(sizeof(fftw_complex) * c.size()), out(sizeof(double) * m);
  auto* cin = static_cast<fftw_complex*>(in.ptr);
  auto* rout = static_cast<double*>(out.ptr);
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(int(m), cin, rout, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    cin[k][0] = c[k].real();
    cin[k][1] = c[k].imag();
  }
  fftw_execute(plan);
  std::vector<double> res(rout, rout + m);
  const double scale = 1.0 / double(m);
  for (double& v : res) v *= scale;
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return res;
}

}  // namespace orlicz::detail
