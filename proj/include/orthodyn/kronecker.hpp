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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "orthodyn/common.hpp"

/// Nested arc construction of a p-Kronecker Cantor set.
///
/// Level n consists of 2^n pairwise disjoint closed arcs; arc i at level n
/// has children 2i and 2i+1 at level n+1, so its word is the n-bit binary
/// expansion of i. At level n the children are lifted so that the character
/// x -> e(p^{k_n} x) lands within eps_n of f_n at the parent midpoint.
namespace orthodyn::kronecker {

using Real = long double;

/// Closed arc [start, start + length] mod 1, start in [0, 1), length in (0, 1].
struct Arc {
  Real start = 0;
  Real length = 1;

  Real end() const { return start + length; }
  Real center() const;  // mod 1
};

struct ArcSet {
  std::size_t level = 0;
  std::vector<Arc> arcs;

  std::string word(std::size_t i) const;
};

ArcSet full_circle();

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Real value() const { return static_cast<Real>(num) / static_cast<Real>(den); }
};

/// f(x) = e(w x + sum_{j=1}^d a_j cos(2 pi j x) + b_j sin(2 pi j x)).
struct TestFunction {
  std::int64_t winding = 0;
  std::vector<Rational> a, b;  // a[j-1], b[j-1]

  std::size_t degree() const { return a.size(); }
  Real phase(Real x) const;
  Complex operator()(Real x) const;
  // sup |phase'|
  double phase_lipschitz() const;
  std::string describe() const;
};

/// All test functions with |w| + d + q = h for h = 1, 2, ..., coefficients in
/// (1/q)Z cap [-1, 1]. Within a height: by d, then |w| (w > 0 first), then q,
/// then coefficients lexicographically (a_1..a_d, b_1..b_d). Functions equal
/// to an earlier one after reducing fractions and dropping trailing zero
/// terms are skipped. f_1 is the constant 1 and f_2 is e(x).
class TestFunctionEnumerator {
 public:
  TestFunction next();

 private:
  void fill();
  std::size_t height_ = 0;
  std::vector<TestFunction> pending_;
  std::size_t cursor_ = 0;
  std::set<std::string> seen_;
};

std::vector<TestFunction> enumerate_test_functions(std::size_t count);

bool is_prime(unsigned p);

struct LiftResult {
  unsigned k = 0;
  std::vector<std::array<Arc, 2>> pairs;  // closed sub-arcs of U_j
};

inline constexpr unsigned kMaxLiftDegree = 64;

// k is the least k >= 1 with p^k |U_j| > 2 for every j. For each j the first
// two components of the preimage of V_j under x -> p^k x that lie in U_j
// (counted from the start of U_j) are returned, pulled inward by a relative
// 1e-6 so the closed sub-arcs sit in the open arcs; a component that sticks
// out of U_j is clipped to it. When V_j is the whole circle the components
// are the p^k equal cells, each shrunk to its middle half. Every result is
// checked to satisfy p^k U_j^{(i)} in V_j; a failure throws Error.
LiftResult arc_lift(unsigned p, std::span<const Arc> u, std::span<const Arc> v);

struct StepResult {
  ArcSet next;
  unsigned k = 0;
  std::vector<Real> centers;  // x_omega, the parent midpoints
};

// Half-width of {z : |z - e(c)| < eps} as an arc around c.
Real target_half_width(double eps);

// Requires 0 < eps <= 1/2. New arcs are cut around their centers to length at
// most min(parent length / 4, 2^{-level}).
StepResult kronecker_step(unsigned p, const ArcSet& prev, const TestFunction& f, double eps);

struct StarResult {
  bool ok = false;
  double worst = 0.0;  // sampled max |e(p^k x) - f(x)|
  double slack = 0.0;  // Lipschitz bound times half the sample spacing
  double bound = 0.0;  // 2 eps
};

// Samples samples_per_arc interior points plus both endpoints of each arc.
// ok iff worst + slack < 2 eps.
StarResult verify_star(unsigned p, const ArcSet& K, const TestFunction& f, unsigned k, double eps,
                       std::size_t samples_per_arc = 64);

struct Certificate {
  std::size_t n = 0;
  unsigned k = 0;
  double epsilon = 0.0;
  double worst = 0.0;
  double slack = 0.0;
  double bound = 0.0;
  bool ok = false;
  std::string function;
};

struct BuildOptions {
  std::function<double(std::size_t)> epsilon;  // eps_n; default 2^{-n}
  std::vector<TestFunction> functions;         // f_1, f_2, ...; default enumeration
  std::size_t samples_per_arc = 64;
};

struct BuildResult {
  std::vector<ArcSet> levels;  // K_0 .. K_depth
  std::vector<Certificate> certificates;
  bool all_ok = true;

  const ArcSet& final_set() const { return levels.back(); }
};

BuildResult build(unsigned p, std::size_t depth, const BuildOptions& opts = {});

// Smallest cyclic gap between consecutive arcs (1 - length for a single arc).
Real min_gap(const ArcSet& K);
bool disjoint(const ArcSet& K, Real margin = 1e-12L);
// Arc i of child lies inside arc i / 2 of parent.
bool nested(const ArcSet& child, const ArcSet& parent);

// Rows level,word,start,length for every level.
void write_arcs_csv(std::span<const ArcSet> levels, std::ostream& os);

}  // namespace orthodyn::kronecker
