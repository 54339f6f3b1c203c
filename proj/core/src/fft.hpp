#pragma once

#include <complex>
#include <span>
#include <vector>

namespace orlicz::detail {

// Unnormalised real-to-half-complex DFT: M/2 + 1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);
// Inverse of rfft including the 1/M factor.
std::vector<double> irfft(std::span<const std::complex<double>> c, std::size_t m);

}  // namespace orlicz::detail
