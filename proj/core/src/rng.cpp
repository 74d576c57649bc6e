#include "ncprox/rng.hpp"

#include <cmath>
#include <numbers>

namespace ncprox {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t fmix64(std::uint64_t z) noexcept {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDULL;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ULL;
  z ^= z >> 33;
  return z;
}

constexpr std::uint64_t rotl(std::uint64_t x, int r) noexcept {
  return (x << r) | (x >> (64 - r));
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return fmix64(fmix64(seed + kGolden) ^ rotl(fmix64(stream ^ 0xA0761D6478BD642FULL), 17));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(derive_key(seed, stream)), counter_(0) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  const std::uint64_t c = counter_++;
  std::uint64_t z = (c + 1) * kGolden ^ key_;
  z = fmix64(z);
  z ^= rotl(key_, 29);
  return fmix64(z + kGolden);
}

CounterRng CounterRng::split(std::uint64_t stream_id) const noexcept {
  return CounterRng(derive_key(key_, stream_id + 1), 0, 0);
}

std::uint64_t CounterRng::uniform_index(std::uint64_t bound) noexcept {
  // Lemire's multiply-and-reject.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ncprox
