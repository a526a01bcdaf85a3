#pragma once

// Reproducible random streams.
//
// Every random quantity in a simulation is drawn from a stream whose seed is
// a pure function of (master seed, replication index, purpose, sub-index):
//
//   stream = mix(mix(mix(master ^ kMasterSalt) + replication * kRepStride)
//                + purpose * kPurposeStride) + sub-index ...
//
// where mix() is the SplitMix64 finalizer. Nothing depends on which thread
// runs a replication or in what order, so results are identical for any
// degree of parallelism.

#include <cstdint>
#include <limits>

namespace hetcell {

using Seed = std::uint64_t;

// SplitMix64 output function (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t {
  kPoints = 1,
  kTiers = 2,
  kGains = 3,
  kResampling = 4,
  kShift = 5,
};

// Seed of the stream used by replication `replication` for `purpose`.
constexpr Seed derive_stream(Seed master, std::uint64_t replication, StreamPurpose purpose) noexcept {
  std::uint64_t s = mix64(master ^ 0x6A09E667F3BCC909ULL);
  s = mix64(s + replication * 0xD1B54A32D192ED03ULL);
  return mix64(s + static_cast<std::uint64_t>(purpose) * 0x8CB92BA72F3D8DD7ULL);
}

// Child stream of an existing stream, e.g. one per access point or per
// (access point, pixel) pair.
constexpr Seed derive_substream(Seed stream, std::uint64_t index) noexcept {
  return mix64(stream + mix64(index + 0x3C6EF372FE94F82BULL));
}

// Counter-based 64-bit generator: the n-th output is mix64(key + n * gamma).
// Satisfies UniformRandomBitGenerator; cheap to construct per draw site.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterEngine(Seed key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
  }

 private:
  Seed key_;
  std::uint64_t counter_ = 0;
};

// Uniform draw on the open interval (0, 1) with 53-bit resolution:
// ((k >> 11) + 0.5) * 2^-53, so the extreme values are 2^-54 and 1 - 2^-54.
template <class Engine>
double uniform_open01(Engine& engine) {
  static_assert(Engine::max() == std::numeric_limits<std::uint64_t>::max() && Engine::min() == 0,
                "uniform_open01 needs a full-range 64-bit engine");
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace hetcell
