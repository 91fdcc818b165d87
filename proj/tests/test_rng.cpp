#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "jumplab/rng.hpp"

using namespace jumplab;

TEST_CASE("stream keys are deterministic and separate streams") {
  CHECK(derive_stream_key(1, 2, 3) == derive_stream_key(1, 2, 3));
  CHECK(derive_stream_key(1, 2, 3) != derive_stream_key(1, 2, 4));
  CHECK(derive_stream_key(1, 2, 3) != derive_stream_key(1, 3, 3));
  CHECK(derive_stream_key(1, 2, 3) != derive_stream_key(2, 2, 3));

  Rng a(7, stream::kSimulate, 0);
  Rng b(7, stream::kSimulate, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());

  Rng c(7, stream::kSimulate, 1);
  bool all_equal = true;
  Rng a2(7, stream::kSimulate, 0);
  for (int i = 0; i < 100; ++i) all_equal = all_equal && (a2.raw() == c.raw());
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 stays in [0,1) and hits the right mean") {
  Rng rng(11, 1, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // 3 sigma band for the mean of Uniform[0,1): sd = 1/sqrt(12).
  CHECK(std::abs(sum / n - 0.5) < 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(double(n)));

  Rng rng2(11, 1, 1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng2.uniform01_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("uniform(a,b) maps into the interval") {
  Rng rng(3, 1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 5.0);
    CHECK(u >= -2.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("exponential has the right mean and is positive") {
  Rng rng(5, 1, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = rng.exponential(2.0);
    REQUIRE(e > 0.0);
    sum += e;
  }
  // mean 1/rate = 0.5, sd 0.5.
  CHECK(std::abs(sum / n - 0.5) < 3.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("poisson matches mean and variance at small and large intensity") {
  Rng rng(13, 1, 0);
  CHECK(rng.poisson(0.0) == 0);

  const int n = 50000;
  {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += double(rng.poisson(0.7));
    CHECK(std::abs(sum / n - 0.7) < 3.0 * std::sqrt(0.7 / n));
  }
  {
    // Chunked inversion above mean 30; check a mean that crosses the chunks.
    double sum = 0.0, sq = 0.0;
    const int n2 = 20000;
    for (int i = 0; i < n2; ++i) {
      const double k = double(rng.poisson(100.0));
      sum += k;
      sq += k * k;
    }
    const double mean = sum / n2;
    const double var = sq / n2 - mean * mean;
    CHECK(std::abs(mean - 100.0) < 3.0 * std::sqrt(100.0 / n2));
    CHECK(std::abs(var - 100.0) < 10.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(17, 1, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("categorical_from_cdf respects unnormalized weights") {
  Rng rng(19, 1, 0);
  // Weights 1, 2, 3 as cumulative sums.
  const std::vector<double> cdf{1.0, 3.0, 6.0};
  std::vector<int> counts(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.categorical_from_cdf(cdf)];
  for (int k = 0; k < 3; ++k) {
    const double p = double(k + 1) / 6.0;
    CHECK(std::abs(double(counts[k]) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }

  const std::vector<double> single{2.5};
  for (int i = 0; i < 100; ++i) CHECK(rng.categorical_from_cdf(single) == 0);
}
