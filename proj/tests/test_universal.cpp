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
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "orthodyn/universal.hpp"

using namespace orthodyn;
using namespace orthodyn::universal;

namespace {

TorusPoint pt(std::vector<double> c) { return TorusPoint{std::move(c)}; }

TorusPoint random_point(const CounterRng& rng, std::uint64_t stream, std::size_t d) {
  std::vector<double> c(d);
  for (std::size_t j = 0; j < d; ++j) c[j] = rng.uniform(stream, j);
  return pt(c);
}

std::vector<std::int64_t> random_freqs(const CounterRng& rng, std::uint64_t stream, std::size_t d, std::int64_t bound) {
  std::vector<std::int64_t> m(d);
  for (std::size_t j = 0; j < d; ++j) {
    m[j] = static_cast<std::int64_t>(rng.bits(stream, j) % static_cast<std::uint64_t>(2 * bound + 1)) - bound;
  }
  return m;
}

double torus_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

// e(phase) with the phase reduced in long double.
Complex e_long(long double phase) {
  phase -= std::floor(phase);
  return oracle::e(static_cast<double>(phase));
}

}  // namespace

TEST_CASE("apply_A fixes z when y = 0 and has order 2 at y = 1/2") {
  const auto s = make_state(pt({0.0, 0.0}), pt({0.3, 0.7}), pt({0.125, 0.9}));
  CHECK(apply_A(s).z == s.z);
  const auto h = make_state(pt({0.5, 0.5}), pt({0.1, 0.2}), pt({0.25, 0.75}));
  const auto h1 = apply_A(h);
  CHECK(h1.z.coords[0] == 0.75);
  CHECK(h1.z.coords[1] == 0.25);
  CHECK(apply_A(h1).z == h.z);
}

TEST_CASE("apply_A_power matches repeated stepping for n <= 100") {
  const CounterRng rng(11);
  const auto s = make_state(random_point(rng, 0, 5), random_point(rng, 1, 5), random_point(rng, 2, 5));
  UniversalState stepped = s;
  for (std::uint64_t n = 1; n <= 100; ++n) {
    stepped = apply_A(stepped);
    const auto closed = apply_A_power(s, n);
    for (std::size_t j = 0; j < 5; ++j) CHECK(torus_distance(closed.z.coords[j], stepped.z.coords[j]) < 1e-13);
  }
}

TEST_CASE("apply_A preserves y and v exactly and F(Aw) = chi3(y) F(w)") {
  const CounterRng rng(5);
  double worst_d1 = 0.0, worst_long = 0.0, worst_ratio = 0.0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 8;
    const auto w = make_state(random_point(rng, 4 * trial, d), random_point(rng, 4 * trial + 1, d),
                              random_point(rng, 4 * trial + 2, d));
    const auto f = make_character(random_freqs(rng, 4 * trial + 3, d, 1000),
                                  random_freqs(rng, 4 * trial + 3 + (1u << 20), d, 1000),
                                  random_freqs(rng, 4 * trial + 3 + (2u << 20), d, 1000));
    const auto aw = apply_A(w);
    REQUIRE(aw.y == w.y);
    REQUIRE(aw.v == w.v);
    const Complex target = chi3(f, w.y) * evaluate(f, w);
    const double stored = std::abs(evaluate(f, aw) - target);
    worst_long = std::max(worst_long, std::abs(evaluate_after(f, w, 1) - target));
    if (d == 1) worst_d1 = std::max(worst_d1, stored);
    // storing z + y as a double moves each coordinate by at most half an ulp
    double m3 = 0.0;
    for (auto m : f.m3) m3 += std::fabs(static_cast<double>(m));
    worst_ratio = std::max(worst_ratio, stored / (kTwoPi * 0x1p-53 * m3 + 1e-15));
  }
  CHECK(worst_d1 <= 1e-12);
  CHECK(worst_long <= 1e-12);
  CHECK(worst_ratio <= 1.0);
}

TEST_CASE("state and character validation") {
  CHECK_THROWS_AS(make_state(pt({0.1}), pt({0.1, 0.2}), pt({0.3})), InvalidArgument);
  CHECK_THROWS_AS(make_state(pt({1.0}), pt({0.1}), pt({0.3})), InvalidArgument);
  CHECK_THROWS_AS(make_state(pt(std::vector<double>(65, 0.0)), pt(std::vector<double>(65, 0.0)),
                             pt(std::vector<double>(65, 0.0))),
                  InvalidArgument);
  CHECK_THROWS_AS(make_character({1001}, {0}, {0}), InvalidArgument);
  CHECK_THROWS_AS(make_character({1}, {0, 1}, {0}), InvalidArgument);
}

TEST_CASE("eta_tilde_sample puts rational coordinates on their cyclic grid") {
  const auto eta = point_mass(pt({3.0 / 8.0, 0.0}), pt({0.2, 0.4}), 9);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto w = eta_tilde_sample(eta, i);
    const double scaled = w.z.coords[0] * 8.0;
    CHECK(scaled == std::round(scaled));
    CHECK(w.z.coords[1] == 0.0);
  }
}

TEST_CASE("eta_tilde_sample of an irrational rotation number is close to uniform") {
  const auto eta = point_mass(pt({std::sqrt(2.0) - 1.0}), pt({0.0}), 21);
  const std::size_t n = 100000;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = eta_tilde_sample(eta, i, 1'000'000).z.coords[0];
  std::sort(z.begin(), z.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ks = std::max({ks, std::fabs(z[i] - static_cast<double>(i) / n), std::fabs(z[i] - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("samples depend only on seed and index") {
  const auto eta = product_law({UniformLaw{}, PointLaw{0.25}}, {UniformLaw{}, UniformLaw{}}, 3);
  const auto a = eta_tilde_sample(eta, 17);
  const auto b = eta_tilde_sample(eta, 17);
  CHECK(a.y == b.y);
  CHECK(a.v == b.v);
  CHECK(a.z == b.z);
  CHECK(a.y.coords[1] == 0.25);
  CHECK_THROWS_AS(eta_tilde_sample(eta, 0, 0), InvalidArgument);
}

TEST_CASE("point-mass eta: both sides equal chi3(y0)^n for n <= 1000") {
  const CounterRng rng(77);
  const std::size_t d = 6;
  const auto eta = point_mass(random_point(rng, 0, d), random_point(rng, 1, d), 4);
  const auto f = make_character(random_freqs(rng, 2, d, 1000), random_freqs(rng, 3, d, 1000),
                                random_freqs(rng, 4, d, 1000));
  const auto report = spectral_wzors_check(f, eta, 1000, 32);
  REQUIRE(report.rows.size() == 1001);
  CHECK(report.max_discrepancy <= 1e-12);
  // independent route: chi3(y0)^n by repeated multiplication, and n m3.y0 in
  // long double from scratch
  const auto& y0 = std::get<PointMass>(eta.kind).y0.coords;
  long double base = 0.0L;
  for (std::size_t j = 0; j < d; ++j) base += static_cast<long double>(f.m3[j]) * y0[j];
  for (std::uint64_t n : {0u, 1u, 2u, 17u, 999u, 1000u}) {
    long double phase = 0.0L;
    for (std::size_t j = 0; j < d; ++j) {
      const long double nx = static_cast<long double>(n) * y0[j];
      phase += static_cast<long double>(f.m3[j]) * (nx - std::floor(nx));
    }
    CHECK(std::abs(report.rows[n].analytic - e_long(phase)) < 1e-12);
  }
  Complex power{1.0, 0.0};
  const Complex step = e_long(base);
  for (std::uint64_t n = 0; n <= 50; ++n) {
    CHECK(std::abs(report.rows[n].empirical - power) < 1e-12);
    power *= step;
  }
}

TEST_CASE("chi3 = 0 gives constant coefficient 1 on both sides") {
  const auto eta = product_law({UniformLaw{}, UniformLaw{}}, {UniformLaw{}, PointLaw{0.5}}, 8);
  const auto f = make_character({3, -2}, {5, 1}, {0, 0});
  const auto report = spectral_wzors_check(f, eta, 40, 2000);
  CHECK(report.max_discrepancy == 0.0);
  for (const auto& row : report.rows) CHECK(row.analytic == Complex{1.0, 0.0});
}

TEST_CASE("product eta with a uniform coordinate: Monte-Carlo coefficient below 4/sqrt(M)") {
  const std::size_t m = 100000;
  const auto eta = product_law({UniformLaw{}, PointLaw{0.3}}, {UniformLaw{}, UniformLaw{}}, 2024);
  const auto f = make_character({0, 1}, {2, 0}, {1, 0});
  const auto report = spectral_wzors_check(f, eta, 20, m);
  CHECK(std::abs(report.rows[0].empirical - Complex{1.0, 0.0}) < 1e-12);
  for (std::size_t n = 1; n < report.rows.size(); ++n) {
    CHECK(report.rows[n].analytic == Complex{0.0, 0.0});
    CHECK(std::abs(report.rows[n].empirical) <= 4.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST_CASE("empirical eta uses the sampled average as its analytic side") {
  const auto eta = empirical({pt({0.1}), pt({0.55}), pt({0.9})}, {pt({0.0}), pt({0.3}), pt({0.6})}, 6);
  const auto f = make_character({1}, {-1}, {7});
  const auto report = spectral_wzors_check(f, eta, 100, 3000);
  CHECK(report.max_discrepancy <= 1e-12);
  CHECK(std::abs(report.rows[0].analytic - Complex{1.0, 0.0}) < 1e-12);
  CHECK_THROWS_AS(spectral_wzors_check(f, eta, 10, 0), InvalidArgument);
}

TEST_CASE("a2 reduction with beta = 0 is the plain block sum") {
  const auto u = sequences::random_signs(500, 3);
  const auto blocks = momo::make_blocks(momo::Poly{2}, 20);
  const CounterRng rng(1);
  std::vector<TorusPoint> pts;
  for (std::size_t k = 0; k < blocks.blocks(); ++k) pts.push_back(random_point(rng, k, 4));
  const std::vector<std::int64_t> alpha{3, -1}, beta{0, 0};
  const auto red = a2_reduction_identity(alpha, beta, blocks, pts, u);
  for (std::size_t k = 0; k < blocks.blocks(); ++k) {
    Complex s{0.0, 0.0};
    for (std::uint64_t n = blocks.b[k]; n < blocks.b[k + 1]; ++n) s += u(n);
    CHECK(std::fabs(red.rhs[k] - std::abs(s)) < 1e-12);
    CHECK(std::fabs(red.lhs[k] - std::abs(s)) < 1e-12);
  }
}

TEST_CASE("a2 reduction, one factor: brute-force orbit expansion at block length 10") {
  const auto u = sequences::phase_sequence(std::vector<double>{0.0, 0.137, 0.0025}, 200);
  const auto blocks = momo::make_blocks(std::vector<std::uint64_t>{1, 11, 21, 31, 41, 51});
  const CounterRng rng(12);
  std::vector<TorusPoint> pts;
  for (std::size_t k = 0; k < blocks.blocks(); ++k) pts.push_back(random_point(rng, k, 2));
  const std::vector<std::int64_t> alpha{2}, beta{1};
  const auto red = a2_reduction_identity(alpha, beta, blocks, pts, u);
  for (std::size_t k = 0; k < blocks.blocks(); ++k) {
    const long double x = pts[k].coords[0], y = pts[k].coords[1];
    Complex s{0.0, 0.0};
    for (std::uint64_t n = blocks.b[k]; n < blocks.b[k + 1]; ++n) {
      // (x, y) -> (x, x + y) applied n times lands at (x, n x + y)
      s += e_long(2 * x + (static_cast<long double>(n) * x + y)) * u(n);
    }
    CHECK(std::fabs(red.lhs[k] - std::abs(s)) < 1e-12);
  }
  CHECK(red.max_residual <= 1e-12);
}

TEST_CASE("a2 reduction identity over 20 seeded trials") {
  const auto u = sequences::mobius(2000);
  const auto blocks = momo::make_blocks(momo::Poly{2}, 40);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CounterRng rng(seed);
    const std::size_t t = 1 + seed % 6;
    std::vector<TorusPoint> pts;
    for (std::size_t k = 0; k < blocks.blocks(); ++k) pts.push_back(random_point(rng, k, 2 * t));
    const auto alpha = random_freqs(rng, 1000, t, 50);
    const auto beta = random_freqs(rng, 1001, t, 50);
    worst = std::max(worst, a2_reduction_identity(alpha, beta, blocks, pts, u).max_residual);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("a2 reduction argument checks") {
  const auto u = sequences::mobius(10);
  const auto blocks = momo::make_blocks(std::vector<std::uint64_t>{1, 5, 20});
  std::vector<TorusPoint> pts{pt({0.1, 0.2}), pt({0.3, 0.4})};
  const std::vector<std::int64_t> a{1}, b{1};
  CHECK_THROWS_AS(a2_reduction_identity(a, b, blocks, pts, u), InsufficientData);
  CHECK_THROWS_AS(a2_reduction_identity(a, std::vector<std::int64_t>{}, blocks, pts, u), InvalidArgument);
}
