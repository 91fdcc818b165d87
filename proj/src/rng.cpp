#include "jumplab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace jumplab {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64_next(state);
  state ^= purpose * 0xd1342543de82ef95ULL;
  key ^= splitmix64_next(state);
  state ^= index * 0xaf251af3b0f025b5ULL;
  key ^= splitmix64_next(state);
  return key;
}

double Rng::exponential(double rate) { return -std::log(uniform01_open()) / rate; }

std::uint64_t Rng::poisson(double mean) {
  std::uint64_t total = 0;
  // Poisson(m1 + m2) = Poisson(m1) + Poisson(m2); chunking keeps the
  // inversion products away from underflow for large means.
  while (mean > 30.0) {
    total += poisson(30.0);
    mean -= 30.0;
  }
  if (mean <= 0.0) return total;
  const double u = uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && k < 400) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

double Rng::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform01_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::categorical_from_cdf(const std::vector<double>& cdf) {
  const double u = uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace jumplab
