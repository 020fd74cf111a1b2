// Copyright 2026 The orthodyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "orthodyn/common.hpp"

using namespace orthodyn;

TEST_CASE("frac_mul matches exact rational arithmetic") {
  CHECK(frac_mul(0.5, 3) == 0.5);
  CHECK(frac_mul(0.25, 7) == 0.75);
  CHECK(frac_mul(-0.25, 1) == 0.75);
  CHECK(frac_mul(3.0, 12345) == 0.0);
  // 2^-60 * (2^60 + 5) has fraction 5 * 2^-60
  const u128 big = (static_cast<u128>(1) << 60) + 5;
  CHECK(frac_mul(std::ldexp(1.0, -60), big) == std::ldexp(5.0, -60));
  // huge multiplier: only the low bits survive
  const u128 huge = (static_cast<u128>(1) << 100) + 3;
  CHECK(frac_mul(0.125, huge) == 0.375);
}

TEST_CASE("frac_mul agrees with long double for moderate products") {
  const double a = std::sqrt(2.0) - 1.0;
  for (std::uint64_t n : {1ULL, 7ULL, 1000ULL, 123456ULL, 99999999ULL}) {
    const long double p = static_cast<long double>(a) * static_cast<long double>(n);
    const double expect = static_cast<double>(p - std::floor(p));
    CHECK(std::fabs(frac_mul(a, n) - expect) < 1e-12);
  }
}

TEST_CASE("unit has modulus one and the right angle") {
  CHECK(std::abs(unit(0.0) - Complex(1, 0)) == 0.0);
  CHECK(std::abs(unit(0.25) - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(unit(7.5) - Complex(-1, 0)) < 1e-15);
  CHECK(std::abs(std::abs(unit(0.123456789)) - 1.0) < 1e-15);
}

TEST_CASE("pairwise_sum is exact on integers and independent of thread count") {
  std::vector<double> xs(10007);
  std::iota(xs.begin(), xs.end(), 1.0);
  CHECK(pairwise_sum(xs) == 10007.0 * 10008.0 / 2.0);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  const unsigned saved = thread_count();
  set_thread_count(4);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
    if (i == 3) throw InvalidArgument("boom");
  }), InvalidArgument);
  set_thread_count(saved);
}

TEST_CASE("CounterRng is a pure function of (seed, stream, counter)") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.bits(1, 5) == b.bits(1, 5));
  CHECK(a.bits(1, 5) != c.bits(1, 5));
  CHECK(a.bits(1, 5) != a.bits(2, 5));
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) mean += a.uniform(0, i);
  mean /= 100000;
  CHECK(std::fabs(mean - 0.5) < 0.005);
}
