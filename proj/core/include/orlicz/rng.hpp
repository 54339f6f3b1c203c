#pragma once

#include <array>
#include <cstdint>

namespace orlicz {

// Philox4x32-10 (Salmon et al. counter-based generator).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Child stream keyed off (base, salt); used to give sub-generators disjoint streams.
SeedSpec derive_stream(const SeedSpec& base, std::uint64_t salt);

// Pure map (seed, stream, counter) -> 128 random bits.
class CounterRng {
 public:
  explicit CounterRng(const SeedSpec& spec);

  PhiloxCounter block(std::uint64_t counter) const;

  // Uniform on (0,1) from the top 52 bits; the half-ulp offset keeps both ends open.
  static double unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 12;
    return (double(bits) + 0.5) * 0x1.0p-52;
  }

 private:
  PhiloxKey key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
};

}  // namespace orlicz
