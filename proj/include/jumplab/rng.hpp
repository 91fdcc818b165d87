#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace jumplab {

// Every random quantity in the artifact is drawn from a stream derived from
// one 64-bit scenario seed, a purpose tag, and an index (usually the path
// number). Streams are independent of scheduling, so serial and parallel
// runs of the same scenario are bit-identical.
//
// Derivation: three rounds of the splitmix64 output function over
// seed, purpose, index in that order.

namespace stream {
// Purpose tags (stable; documented in the README).
inline constexpr std::uint64_t kSimulate = 1;
inline constexpr std::uint64_t kLawX = 2;
inline constexpr std::uint64_t kLawY = 3;
inline constexpr std::uint64_t kCoupleFree = 4;
inline constexpr std::uint64_t kCoupleAux = 5;
inline constexpr std::uint64_t kCoupleDecision = 6;
inline constexpr std::uint64_t kKhasminskii = 7;
inline constexpr std::uint64_t kGallery = 8;
inline constexpr std::uint64_t kConditionN = 9;
inline constexpr std::uint64_t kConditionS = 10;
inline constexpr std::uint64_t kBootstrap = 11;
inline constexpr std::uint64_t kDelta = 12;
}  // namespace stream

std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

// Deterministic, implementation-stable samplers on top of std::mt19937_64
// (whose output sequence the standard fully specifies). Distribution adapters
// from <random> are avoided on purpose: their algorithms differ between
// standard libraries, which would break the bit-identical-results contract.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : gen_(key) {}
  Rng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
      : gen_(derive_stream_key(seed, purpose, index)) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1): 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1): never returns an endpoint, safe under log().
  double uniform01_open() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential(double rate);

  // Exact Poisson sampling via chunked inversion (stable for large means).
  std::uint64_t poisson(double mean);

  // Standard normal via Box-Muller (used only for uniform sphere directions in d > 3).
  double normal();

  // Index into an unnormalized cumulative weight vector (strictly increasing,
  // last entry = total mass).
  std::size_t categorical_from_cdf(const std::vector<double>& cdf);

 private:
  std::mt19937_64 gen_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace jumplab
