#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cvm {

/// Philox4x32-10 counter-based generator.
///
/// The key is the master seed; the high half of the 128-bit counter is the
/// stream (replicate) index and the low half counts blocks drawn. Two
/// generators built from the same (seed, stream) pair produce identical
/// sequences regardless of which thread drives them.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t master_seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Exponential variate with the given rate (> 0).
  double exponential(double rate) noexcept;

  /// Uniform integer on [0, bound), bound > 0. Unbiased (Lemire).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  using Block = std::array<std::uint32_t, 4>;
  static Block philox(Block counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

} // namespace cvm
