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
#include "orthodyn/spectral.hpp"

using namespace orthodyn;
using namespace orthodyn::spectral;
using sequences::BoundedSequence;

namespace {
const double kAlpha = std::sqrt(2.0) - 1.0;
const double kBeta = std::sqrt(3.0) - 1.0;

double cyclic_distance(double a, double b) {
  const double d = std::fabs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

// Shared large-N estimate for the two-atom sequence.
const AutocorrEstimate& two_atom_autocorr() {
  static const AutocorrEstimate c = autocorr(sequences::two_atom(kAlpha, kBeta, 1001000), 1000000, 1000);
  return c;
}
}  // namespace

TEST_CASE("autocorr examples") {
  const auto one = autocorr(sequences::constant(1.0, 1300), 1000, 250);
  for (const auto& v : one.c) CHECK(v == Complex(1.0, 0.0));
  CHECK(one.h_max() == 250);
  CHECK(one.N == 1000);

  // brute force at N = 10^3 against the closed form
  const std::size_t n = 1000;
  const auto u = sequences::two_atom(kAlpha, kBeta, n + 250);
  const auto c = autocorr(u, n, 250);
  for (std::size_t h = 0; h <= 250; ++h) {
    Complex brute = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const Complex a = 0.5 * oracle::e(std::fmod(k * kAlpha, 1.0)) + 0.5 * oracle::e(std::fmod(k * kBeta, 1.0));
      const Complex b = 0.5 * oracle::e(std::fmod((k + h) * kAlpha, 1.0)) +
                        0.5 * oracle::e(std::fmod((k + h) * kBeta, 1.0));
      brute += a * std::conj(b);
    }
    brute /= double(n);
    REQUIRE(std::abs(c.c[h] - brute) < 1e-11);
    const Complex closed = 0.25 * oracle::e(-std::fmod(h * kAlpha, 1.0)) + 0.25 * oracle::e(-std::fmod(h * kBeta, 1.0));
    REQUIRE(std::abs(c.c[h] - closed) < 2.0 / n / (2 * cyclic_distance(kAlpha, kBeta)));
  }

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t big = 100000;
    const auto r = autocorr(sequences::random_signs(big + 64, seed), big, 64);
    for (std::size_t h = 1; h <= 64; ++h) CHECK(std::abs(r.c[h]) <= 3.0 / std::sqrt(double(big)) * 1.5);
  }
  CHECK_THROWS_AS(autocorr(sequences::constant(1.0, 200), 100, 26), InvalidArgument);
}

TEST_CASE("autocorr invariants") {
  const std::size_t n = 20000;
  const BoundedSequence seqs[] = {sequences::mobius(n + 5000), sequences::random_signs(n + 5000, 4),
                                  sequences::two_atom(0.1, 0.7, n + 5000).scaled(0.9)};
  for (const auto& u : seqs) {
    const auto c = autocorr(u, n, n / 4);
    CHECK(c.c[0].imag() == 0.0);
    CHECK(c.c[0].real() >= 0.0);
    CHECK(c.c[0].real() <= 1.0);
    for (const auto& v : c.c) REQUIRE(std::abs(v) <= c.c[0].real() + 5e-3);
  }
}

TEST_CASE("atom_mass examples") {
  const auto one = autocorr(sequences::constant(1.0, 2000), 1500, 300);
  CHECK(atom_mass(one, 0.0, 300) == doctest::Approx(1.0).epsilon(1e-14));

  const auto& c = two_atom_autocorr();
  const std::size_t h = 1000;
  const double dist = cyclic_distance(kAlpha, kBeta);
  for (double theta : {kAlpha, kBeta}) {
    const double m = atom_mass(c, theta, h);
    CHECK(std::fabs(m - 0.25) <= 2.0 / h + 2.0 / (h * dist));
    // brute-force kernel sum on the closed-form correlations
    Complex brute = 0;
    for (std::size_t k = 1; k <= h; ++k) {
      const Complex closed = 0.25 * oracle::e(-std::fmod(k * kAlpha, 1.0)) + 0.25 * oracle::e(-std::fmod(k * kBeta, 1.0));
      brute += oracle::e(std::fmod(k * theta, 1.0)) * closed;
    }
    CHECK(m == doctest::Approx(brute.real() / h).epsilon(1e-3));
  }
  for (double theta : {0.0, 0.2, 0.55, 0.9}) {
    REQUIRE(cyclic_distance(theta, kAlpha) >= 0.1);
    REQUIRE(cyclic_distance(theta, kBeta) >= 0.1);
    CHECK(atom_mass(c, theta, h) <= 0.02);
  }
  CHECK_THROWS_AS(atom_mass(c, 0.0, 1001), InvalidArgument);
  CHECK_THROWS_AS(atom_mass(c, 0.0, 0), InvalidArgument);
}

TEST_CASE("atom_mass is the u1 estimator") {
  const std::size_t n = 30000, h = 200;
  const BoundedSequence seqs[] = {sequences::mobius(n + h), sequences::random_signs(n + h, 8),
                                  sequences::two_atom(kAlpha, 0.3, n + h)};
  for (const auto& u : seqs) {
    const auto c = autocorr(u, n, h);
    CHECK(std::fabs(atom_mass_detail(c, 0.0, h).raw.real() - ghk::u1_sq(u, n, h).raw.real()) <= 1e-12);
    for (double theta : {kAlpha, 0.3, 0.77}) {
      CHECK(std::fabs(atom_mass_detail(c, theta, h).raw.real() - ghk::u1_lambda_sq(u, theta, n, h).raw.real()) <= 1e-12);
    }
  }
}

TEST_CASE("wiener_sum examples") {
  const auto one = autocorr(sequences::constant(1.0, 2000), 1500, 300);
  CHECK(wiener_sum(one, 300) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wiener_sum(two_atom_autocorr(), 1000) == doctest::Approx(0.125).epsilon(0.01 / 0.125));
  const std::size_t n = 1000000;
  const auto r = autocorr(sequences::random_signs(n + 100, 2), n, 100);
  CHECK(wiener_sum(r, 100) <= 10.0 / n);
}

TEST_CASE("atom_scan examples") {
  const auto one = autocorr(sequences::constant(1.0, 1000), 800, 100);
  const auto single = atom_scan(one, 800, 100);
  REQUIRE(single.size() == 1);
  CHECK(cyclic_distance(single[0].theta, 0.0) < 1e-9);
  CHECK(std::abs(single[0].lambda - Complex(1.0, 0.0)) < 1e-9);
  CHECK(single[0].mass == doctest::Approx(1.0).epsilon(1e-12));

  const std::size_t h = 1000, g = 8 * h;
  const auto atoms = atom_scan(two_atom_autocorr(), g, h);
  REQUIRE(atoms.size() == 2);
  CHECK(cyclic_distance(atoms[0].theta, kAlpha) <= 1.0 / (2 * g));
  CHECK(cyclic_distance(atoms[1].theta, kBeta) <= 1.0 / (2 * g));
  for (const auto& a : atoms) {
    CHECK(std::fabs(a.mass - 0.25) <= 0.02);
    CHECK(std::abs(a.lambda - oracle::e(a.theta)) < 1e-12);
  }

  // dense brute-force scan of the quadratic phase finds nothing above tau
  const std::size_t n = 10000, hq = 1000;
  const double coeffs[] = {0.0, 0.0, kAlpha};
  const auto q = autocorr(sequences::phase_sequence(coeffs, n + hq), n, hq);
  CHECK(atom_scan(q, 8 * hq, hq).empty());
  double brute_max = 0;
  for (std::size_t j = 0; j < 4 * hq; ++j) {
    Complex s = 0;
    for (std::size_t k = 1; k <= hq; ++k) s += oracle::e(std::fmod(double(k * j) / (4 * hq), 1.0)) * q.c[k];
    brute_max = std::max(brute_max, s.real() / hq);
  }
  CHECK(brute_max < kDefaultAtomThreshold);

  // nearby atoms survive the sidelobe rejection
  const auto close = autocorr(sequences::two_atom(0.1, 0.12, 100500), 100000, 500);
  const auto pair = atom_scan(close, 4000, 500);
  REQUIRE(pair.size() == 2);
  CHECK(cyclic_distance(pair[0].theta, 0.1) <= 1.0 / 8000);
  CHECK(cyclic_distance(pair[1].theta, 0.12) <= 1.0 / 8000);

  CHECK_THROWS_AS(atom_scan(one, 7, 100), InvalidArgument);
  CHECK_NOTHROW(atom_scan(one, 8, 100));
}

TEST_CASE("wiener_sum dominates the squared atom masses") {
  const std::size_t n = 200000, h = 500;
  const BoundedSequence seqs[] = {sequences::two_atom(kAlpha, kBeta, n + h), sequences::two_atom(0.1, 0.15, n + h),
                                  sequences::mobius(n + h), sequences::constant(1.0, n + h)};
  for (const auto& u : seqs) {
    const auto c = autocorr(u, n, h);
    double squares = 0;
    for (const auto& a : atom_scan(c, 8 * h, h)) squares += a.mass * a.mass;
    CAPTURE(u.label());
    CHECK(wiener_sum(c, h) >= squares - 0.02);
  }
}

TEST_CASE("u2 of a two-piece concatenation averages the per-piece Wiener sums") {
  const std::size_t n = 1000000;
  const std::size_t levels[] = {300, 300};
  const double c[] = {0.0, kAlpha};
  const auto rotation = sequences::phase_sequence(c, n + 1000);
  const auto atoms = sequences::two_atom(kAlpha, kBeta, n + 1000);
  const auto u = sequences::concatenate(rotation, atoms, n / 2);
  // per-piece closed forms: one atom of mass 1, two atoms of mass 1/4
  const double expected = 0.5 * (1.0 + 2.0 * 0.25 * 0.25);
  const auto est = ghk::us_norm(u, 2, n, levels);
  CHECK(std::fabs(est.raw.real() - expected) <= 0.05);
  const double half_wiener =
      0.5 * (wiener_sum(autocorr(rotation, n / 2, 300), 300) + wiener_sum(two_atom_autocorr(), 300));
  CHECK(std::fabs(est.raw.real() - half_wiener) <= 0.05);
}
