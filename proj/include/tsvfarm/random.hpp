#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tsvfarm {

/// Draws consumed by the annealer. Abstract so tests can script them.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// Uniform in [0, 1).
  virtual double uniform() = 0;
  /// Uniform integer in [0, n); n == 1 returns 0 without drawing.
  virtual std::size_t below(std::size_t n) = 0;
};

/// 64-bit Mersenne Twister with explicit, portable conversions (the standard
/// distributions are implementation-defined, so they are not used). The
/// name is recorded in run reports so traces can be replayed.
class Mt64Source final : public RandomSource {
 public:
  static constexpr const char* kName = "mt19937_64/v1";

  explicit Mt64Source(std::uint64_t seed) : engine_(seed) {}

  double uniform() override;
  std::size_t below(std::size_t n) override;

 private:
  std::mt19937_64 engine_;
};

}  // namespace tsvfarm
