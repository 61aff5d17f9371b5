#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace entsim {

// Counter-based deterministic randomness. Every draw is a pure function of
// (seed, stream tag, counter, slot): shot k can be generated without
// generating shots 0..k-1, and the same seed reproduces the same numbers on
// any platform.

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream tags keep independent random purposes from sharing draws.
// sample() and generate_streams() deliberately share kStreamBorn so the
// noiseless coincidence pipeline reproduces sample() outcome-for-outcome
// for the same seed and shot index.
inline constexpr std::uint64_t kStreamBorn = 0x424f524e;
inline constexpr std::uint64_t kStreamEmit = 0x454d4954;
inline constexpr std::uint64_t kStreamLossA = 0x4c4f5341;
inline constexpr std::uint64_t kStreamLossB = 0x4c4f5342;
inline constexpr std::uint64_t kStreamJitterA = 0x4a495441;
inline constexpr std::uint64_t kStreamJitterB = 0x4a495442;
inline constexpr std::uint64_t kStreamDarkA = 0x44524b41;
inline constexpr std::uint64_t kStreamDarkB = 0x44524b42;
inline constexpr std::uint64_t kStreamHaar = 0x48414152;

class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t tag) : key_(mix64(mix64(seed) ^ tag)) {}

    // Uniform in [0, 1), 53-bit resolution.
    double uniform(std::uint64_t counter, std::uint64_t slot = 0) const {
        const std::uint64_t h = mix64(mix64(key_ ^ counter) + slot);
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes slots (slot, slot+1).
    // 1 - uniform() is bounded away from zero, so the log is always finite.
    double gaussian(std::uint64_t counter, std::uint64_t slot = 0) const {
        const double u1 = uniform(counter, slot);
        const double u2 = uniform(counter, slot + 1);
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Exponential with the given rate; consumes one slot.
    double exponential(std::uint64_t counter, double rate, std::uint64_t slot = 0) const {
        return -std::log1p(-uniform(counter, slot)) / rate;
    }

  private:
    std::uint64_t key_;
};

}  // namespace entsim
