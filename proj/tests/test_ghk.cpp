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

#include "doctest.h"
#include "oracles.hpp"
#include "orthodyn/ghk.hpp"

using namespace orthodyn;
using namespace orthodyn::ghk;
using sequences::BoundedSequence;

namespace {
const double kAlpha = std::sqrt(2.0) - 1.0;

BoundedSequence linear(double alpha, std::size_t n) {
  const double c[] = {0.0, alpha};
  return sequences::phase_sequence(c, n);
}
BoundedSequence quadratic(double alpha, std::size_t n) {
  const double c[] = {0.0, 0.0, alpha};
  return sequences::phase_sequence(c, n);
}
}  // namespace

TEST_CASE("corr examples") {
  CHECK(corr(sequences::constant(1.0, 200), 5, 100) == Complex(1, 0));

  // brute force at N = 50: (1/N) sum e(n a) conj e((n+h) a) = e(-h a)
  const auto u = linear(kAlpha, 80);
  for (std::size_t h = 0; h <= 20; ++h) {
    std::complex<double> brute = 0;
    for (std::size_t n = 1; n <= 50; ++n) brute += oracle::e(n * kAlpha) * std::conj(oracle::e((n + h) * kAlpha));
    brute /= 50.0;
    REQUIRE(std::abs(corr(u, h, 50) - brute) < 1e-12);
    REQUIRE(std::abs(corr(u, h, 50) - oracle::e(-double(h) * kAlpha)) < 1e-12);
  }

  const std::size_t n = 1000000;
  const auto r = sequences::random_signs(n + 1, 7);
  CHECK(std::abs(corr(r, 1, n)) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("corr needs enough data") {
  const auto u = sequences::constant(1.0, 10);
  CHECK_THROWS_AS(corr(u, 1, 10), InsufficientData);
  CHECK_NOTHROW(corr(u, 0, 10));
}

TEST_CASE("two-sided averaging reads through u(-m) = u(m), u(0) = 1") {
  const auto mu = sequences::mobius(40);
  Options opts;
  opts.two_sided = true;
  const std::size_t n = 20, h = 3;
  std::complex<double> brute = 0;
  for (int m = -int(n) + 1; m <= int(n); ++m) {
    auto at = [](int k) { return k == 0 ? 1.0 : double(oracle::trial_mobius(std::abs(k))); };
    brute += at(m) * at(m + int(h));
  }
  brute /= double(2 * n);
  CHECK(std::abs(corr(mu, h, n, opts) - brute) < 1e-15);
  opts.mode = Averaging::logarithmic;
  CHECK_THROWS_AS(corr(mu, h, n, opts), InvalidArgument);
}

TEST_CASE("u1 examples") {
  const auto one = sequences::constant(1.0, 2000);
  CHECK(u1_sq(one, 1000, 64).raw.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u1_sq(one, 1000, 64).value == doctest::Approx(1.0).epsilon(1e-15));

  // geometric-sum bound, brute force at H = 64
  const std::size_t h = 64;
  const auto u = linear(kAlpha, 5000);
  std::complex<double> brute = 0;
  for (std::size_t k = 1; k <= h; ++k) brute += oracle::e(-double(k) * kAlpha);
  brute /= double(h);
  const double bound = 2.0 / (h * std::abs(1.0 - oracle::e(kAlpha)));
  CHECK(std::abs(brute) <= bound);
  const auto est = u1_sq(u, 4000, h);
  CHECK(std::abs(est.raw - brute) < 1e-12);
  CHECK(est.value * est.value <= bound);
}

TEST_CASE("u1 of the Mobius function is small at N = 10^6") {
  const std::size_t n = 1000000, h = 1000;
  const auto mu = sequences::mobius(n + h);
  const auto est = u1_sq(mu, n, h);
  CHECK(est.value * est.value <= 0.02);
  CHECK(est.value >= 0.0);
}

TEST_CASE("u1 preconditions") {
  const auto u = sequences::constant(1.0, 200);
  CHECK_THROWS_AS(u1_sq(u, 100, 0), InvalidArgument);
  CHECK_THROWS_AS(u1_sq(u, 100, 11), InvalidArgument);  // H > N/10
  Options loose;
  loose.max_h_ratio = 0.0;
  CHECK_NOTHROW(u1_sq(u, 100, 50, loose));
}

TEST_CASE("modulated u1: sign convention calibrated by brute force") {
  // brute force at N = 50: which of e(+a), e(-a) makes (1/H) sum lambda^h corr(h) equal 1?
  const std::size_t n = 50, h = 4;
  const auto u = linear(kAlpha, n + h);
  std::complex<double> plus = 0, minus = 0;
  for (std::size_t k = 1; k <= h; ++k) {
    std::complex<double> c = 0;
    for (std::size_t m = 1; m <= n; ++m) c += oracle::e(m * kAlpha) * std::conj(oracle::e((m + k) * kAlpha));
    c /= double(n);
    plus += std::pow(oracle::e(kAlpha), double(k)) * c;
    minus += std::pow(oracle::e(-kAlpha), double(k)) * c;
  }
  plus /= double(h);
  minus /= double(h);
  REQUIRE(std::abs(plus - 1.0) < 1e-12);
  REQUIRE(std::abs(minus - 1.0) > 0.1);
  Options loose;
  loose.max_h_ratio = 0.0;
  CHECK(u1_lambda_sq(u, kAlpha, n, h, loose).raw.real() == doctest::Approx(1.0).epsilon(1e-12));

  const auto one = sequences::constant(1.0, 2000);
  CHECK(u1_lambda_sq(one, 0.0, 1000, 64).value == doctest::Approx(1.0).epsilon(1e-15));
  const auto off = u1_lambda_sq(one, 1.0 / 3.0, 1000, 64);
  CHECK(off.value * off.value <= 2.0 / 64);
}

TEST_CASE("u1 invariants on seeded random sequences") {
  const CounterRng rng(5);
  for (std::uint64_t t = 0; t < 10; ++t) {
    std::vector<Complex> v(600);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = std::polar(rng.uniform(t, 2 * i), kTwoPi * rng.uniform(t, 2 * i + 1));
    }
    const BoundedSequence u(v, "rand");
    const auto base = u1_sq(u, 500, 40);
    // u1_lambda at lambda = 1 is the same number
    CHECK(u1_lambda_sq(u, 0.0, 500, 40).raw == base.raw);
    CHECK(base.value >= 0.0);
    // scaling
    const Complex c = std::polar(0.7, 1.3);
    const auto scaled = u1_sq(u.scaled(c), 500, 40);
    CHECK(std::abs(scaled.raw - std::norm(c) * base.raw) < 1e-12);
  }
}

TEST_CASE("u^2 examples") {
  const auto one = sequences::constant(1.0, 3000);
  CHECK(us_norm(one, 2, 1000, 32).value == doctest::Approx(1.0).epsilon(1e-14));

  const std::size_t n = 100000, h = 1024;
  const auto lin = linear(kAlpha, n + 2 * h);
  CHECK(us_norm(lin, 2, n, h).value >= 0.99);

  // brute force at N = 2^12 for a single Fourier atom
  const auto small = linear(kAlpha, 4096 + 64);
  CHECK(us_norm(small, 2, 4096, 32).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("u^2 of the quadratic phase is small and its raw average decays") {
  const std::size_t n = 1000000, h = 1000;
  const auto q = quadratic(kAlpha, n + 2 * h);
  CHECK(us_norm(q, 2, n, h).value <= 0.2);

  double previous = 1.0;
  for (std::size_t len : {10000u, 100000u, 1000000u}) {
    const auto est = us_norm(q, 2, len, default_h(len));
    CHECK(std::abs(est.raw.real()) < previous);
    previous = std::abs(est.raw.real());
  }
}

TEST_CASE("u^2 recursion agrees with the literal nested average") {
  const auto u = sequences::random_signs(400, 3).times(linear(0.1, 400), "mix");
  const std::size_t n = 300, h1 = 7, h2 = 9;
  std::complex<double> brute = 0;
  for (std::size_t a = 1; a <= h1; ++a) {
    for (std::size_t b = 1; b <= h2; ++b) {
      std::complex<double> c = 0;
      for (std::size_t m = 1; m <= n; ++m) {
        c += u(m + a) * std::conj(u(m)) * std::conj(u(m + b + a) * std::conj(u(m + b)));
      }
      brute += c / double(n);
    }
  }
  brute /= double(h1 * h2);
  const std::size_t levels[] = {h1, h2};
  CHECK(std::abs(us_norm(u, 2, n, levels).raw - brute) < 1e-12);
}

TEST_CASE("U^2 Fourier identity: the oracle itself at N = 2^8") {
  const std::size_t n = 256;
  std::vector<std::complex<double>> f(n);
  const CounterRng rng(9);
  for (std::size_t i = 0; i < n; ++i) f[i] = (rng.bits(0, i) & 1) ? 1.0 : -1.0;
  CHECK(oracle::cyclic_u2_fourth(f) == doctest::Approx(oracle::fourth_moment(f)).epsilon(1e-9));
}

TEST_CASE("u^2 recursion vs fourth-moment Fourier formula at N = 2^14") {
  const std::size_t n = 16384;
  const std::size_t h = default_h(n);
  auto check = [&](const BoundedSequence& u) {
    std::vector<std::complex<double>> f(u.values().begin(), u.values().begin() + n);
    const double fourier = std::pow(oracle::fourth_moment(f), 0.25);
    const double recursion = us_norm(u, 2, n, h).value;
    CHECK(std::fabs(recursion - fourier) <= 0.05);
  };
  check(linear(37.0 / double(n), n + 2 * h));
  check(sequences::two_atom(37.0 / double(n), 1001.0 / double(n), n + 2 * h));
  check(sequences::random_signs(n + 2 * h, 7));
}

TEST_CASE("u^3 of a single atom is one and s is guarded") {
  const auto lin = linear(kAlpha, 3000);
  CHECK(us_norm(lin, 3, 2000, 8).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(us_norm(lin, 4, 2000, 8), InvalidArgument);
  CHECK_THROWS_AS(us_norm(lin, 2, 2990, 8), InsufficientData);
}

TEST_CASE("logarithmic variants") {
  const auto one = sequences::constant(1.0, 3000);
  CHECK(log_variant(Op::u1, one, {2000, 100}).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log_variant(Op::us, one, {2000, 16, 0.0, 2}).value == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t n : {100u, 1000u, 100000u}) {
    const double w = log_weight_total(n);
    CHECK(w >= 1.0);
    CHECK(w <= 1.0 + 2.0 / std::log(double(n)));
  }
  const std::size_t n = 1000000, h = 1000;
  const auto mu = sequences::mobius(n + h);
  const auto est = log_variant(Op::u1, mu, {n, h});
  CHECK(est.mode == Averaging::logarithmic);
  CHECK(est.value * est.value <= 0.03);
}
