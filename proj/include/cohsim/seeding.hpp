#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cohsim {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Identifies one realization inside an ensemble.
///
/// The stream seed is a pure function of (master_seed, realization_index), so
/// realizations can be generated in any order, on any worker, and still be
/// bit-identical.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;

  std::uint64_t stream_seed() const noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(realization_index + 0x632BE59BD9B4E019ULL));
  }

  std::mt19937_64 engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(stream_seed()), static_cast<std::uint32_t>(stream_seed() >> 32)};
    return std::mt19937_64(seq);
  }

  /// An independent family of streams derived from the same master seed.
  /// Used to give the two arms of an interferometer independent draws.
  SeedSpec branch(std::uint64_t stream) const noexcept {
    return {splitmix64(master_seed ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1)), realization_index};
  }

  SeedSpec with_index(std::uint64_t index) const noexcept { return {master_seed, index}; }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// How the two arms of an interferometer draw their realizations.
/// Common: both arms see the same draw (a spatially coherent field).
/// Independent: arm 1 uses an independent branch of the master seed.
enum class ArmCorrelation { Common, Independent };

inline SeedSpec arm_seed(const SeedSpec& base, std::size_t arm, ArmCorrelation correlation) {
  if (arm == 0 || correlation == ArmCorrelation::Common) return base;
  return base.branch(arm);
}

}  // namespace cohsim
