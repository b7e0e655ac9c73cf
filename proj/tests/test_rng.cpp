#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "neurodetect/rng.hpp"

using neurodetect::RngStream;

TEST_CASE("equal seed and stream id give bit-identical sequences") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct stream ids give distinct sequences") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    equal += a.next_u64() == b.next_u64();
  }
  CHECK(equal < 4);
}

TEST_CASE("uniform stays in [0,1) with mean near 1/2") {
  RngStream rng(1, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("uniform_int covers its range uniformly") {
  RngStream rng(3, 0);
  const int n = 60000, m = 5;
  std::vector<int> counts(m, 0);
  for (int i = 0; i < n; ++i) {
    const int v = rng.uniform_int(m);
    REQUIRE(v >= 0);
    REQUIRE(v < m);
    ++counts[static_cast<std::size_t>(v)];
  }
  const double p = 1.0 / m;
  const double bound = 4.0 * std::sqrt(p * (1 - p) / n);
  for (int c : counts) {
    CHECK(std::abs(static_cast<double>(c) / n - p) < bound);
  }
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("gaussian moments") {
  RngStream rng(5, 0);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("poisson moments at small and split-path rates") {
  RngStream rng(9, 0);
  for (double rate : {0.5, 9.0, 600.0}) {
    const int n = rate > 100 ? 20000 : 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(rate));
      sum += k;
      sumsq += k * k;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - rate) < 5.0 * std::sqrt(rate / n));
    CHECK(std::abs(var - rate) < 0.1 * rate);
  }
  CHECK_THROWS_AS(rng.poisson(0.0), std::invalid_argument);
}
