#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "randblock/rng.hpp"

using namespace randblock;

TEST_SUITE("rng") {
  TEST_CASE("stream is a pure function of (seed, index, counter)") {
    CounterRng a(7, 3), b(7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CounterRng c(7, 3);
    CHECK(c.at(42) == CounterRng(7, 3).at(42));
    c.seek(42);
    CHECK(c() == CounterRng(7, 3).at(42));
  }

  TEST_CASE("distinct streams differ") {
    std::set<std::uint64_t> first;
    for (std::uint64_t idx = 0; idx < 1000; ++idx) first.insert(CounterRng(1, idx).at(0));
    CHECK(first.size() == 1000);
    CHECK(CounterRng(1, 0).at(0) != CounterRng(2, 0).at(0));
  }

  TEST_CASE("uniform01 moments") {
    CounterRng r(11, 0);
    const int N = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u = r.uniform01();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      s += u;
      s2 += u * u;
    }
    // 1/12 variance; 6 sigma bands.
    CHECK(std::abs(s / N - 0.5) < 6.0 * std::sqrt(1.0 / 12.0 / N));
    CHECK(std::abs(s2 / N - 1.0 / 3.0) < 6.0 * std::sqrt(4.0 / 45.0 / N));
  }

  TEST_CASE("usable with std distributions") {
    CounterRng r(5, 5);
    std::uniform_int_distribution<int> d(0, 9);
    int hist[10] = {};
    for (int i = 0; i < 10000; ++i) ++hist[d(r)];
    for (int h : hist) CHECK(h > 850);
  }
}
