#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semcomm/rng.hpp"

using namespace semcomm;

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("named substreams are independent of each other") {
  Rng chan = substream(7, "channel");
  Rng init = substream(7, "init");
  CHECK(substream_seed(7, "channel") != substream_seed(7, "init"));
  CHECK(substream_seed(7, "channel", 0) != substream_seed(7, "channel", 1));
  CHECK(substream_seed(7, "channel") == substream_seed(7, "channel"));
  // streams differ in content
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff |= (chan.next_u64() != init.next_u64());
  CHECK(any_diff);
}

TEST_CASE("gaussian moments") {
  Rng rng(99);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_int covers inclusive bounds") {
  Rng rng(5);
  bool lo = false, hi = false;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(3, 7);
    CHECK(v >= 3);
    CHECK(v <= 7);
    lo |= (v == 3);
    hi |= (v == 7);
  }
  CHECK(lo);
  CHECK(hi);
}
