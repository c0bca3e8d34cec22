#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace adequate::numerics {

// Philox4x32-10 counter-based generator. A (seed, stream, index) triple names
// an independent substream, so replicate i of a simulation draws the same
// numbers whichever worker runs it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  // Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal() noexcept;

  // Uniform integer in [0, bound), rejection sampling (no modulo bias).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stable 64-bit id for a textual stream label (FNV-1a).
std::uint64_t stream_id(const char* label) noexcept;

}  // namespace adequate::numerics
