#include "orlicz/rng.hpp"

namespace orlicz {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

SeedSpec derive_stream(const SeedSpec& base, std::uint64_t salt) {
  return {base.seed, splitmix64(base.stream_id ^ splitmix64(salt + 0x632BE59BD9B4E019ull))};
}

CounterRng::CounterRng(const SeedSpec& spec)
    : key_{std::uint32_t(spec.seed), std::uint32_t(spec.seed >> 32)},
      stream_lo_(std::uint32_t(spec.stream_id)),
      stream_hi_(std::uint32_t(spec.stream_id >> 32)) {}

PhiloxCounter CounterRng::block(std::uint64_t counter) const {
  return philox4x32({std::uint32_t(counter), std::uint32_t(counter >> 32), stream_lo_, stream_hi_}, key_);
}

}  // namespace orlicz
