#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qrem {

/// Counter-based random number generation.
///
/// Every random quantity in the library is a pure function of
/// (seed, stream tag, item index), so ensembles are reproducible
/// independent of evaluation order, chunking, or thread count.
/// The core primitive is the splitmix64 finalizer, which is bijective
/// and strongly avalanching.

namespace rng {

/// Purpose tags keeping independent random streams from colliding.
enum class Stream : std::uint64_t {
  kRemField = 0x01,
  kPspinCoupling = 0x02,
  kSlqProbe = 0x03,
  kRealization = 0x04,
  kStartVector = 0x05,
  kSlqRun = 0x06,
};

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Collapses (seed, stream, index) into one stream key.
constexpr std::uint64_t derive_key(std::uint64_t seed, Stream stream,
                                   std::uint64_t index) noexcept {
  std::uint64_t k = mix64(seed ^ 0xa0761d6478bd642fULL);
  k = mix64(k ^ static_cast<std::uint64_t>(stream));
  return mix64(k ^ index);
}

/// Stateless keyed generator: word(i) is the i-th word of the stream,
/// computable in any order.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t word(std::uint64_t i) const noexcept {
    return mix64(key_ + i * kGolden);
  }

  /// Uniform draw on (0, 1]; never returns 0 so logarithms are safe.
  double uniform(std::uint64_t i) const noexcept {
    return static_cast<double>((word(i) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; a pure function of (key, i).
  double gaussian(std::uint64_t i) const noexcept {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fair +/-1 draw.
  double rademacher(std::uint64_t i) const noexcept {
    return (word(i) >> 63) ? 1.0 : -1.0;
  }

 private:
  std::uint64_t key_;
};

}  // namespace rng

}  // namespace qrem
