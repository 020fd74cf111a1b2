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

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "orthodyn/sequences.hpp"
#include "orthodyn/systems.hpp"

/// Finite block functionals of the strong u-MOMO property.
///
/// Block k covers b_k <= n < b_{k+1} for k = 1..K-1; the Cesaro functional
/// restarts the orbit at x_k (f(T^{n-b_k} x_k)) and divides by b_K, the
/// logarithmic one reads f(T^n x_k), weights u(n) by 1/n and divides by
/// log b_K.
namespace orthodyn::momo {

using sequences::BoundedSequence;
using systems::Observable;
using systems::SystemSpec;
using systems::TorusPoint;

struct BlockStructure {
  std::vector<std::uint64_t> b;  // b_1 < ... < b_K, b_1 >= 1
  // min of the last K/4 gaps exceeds min of the first K/4 gaps
  bool growth_ok = false;
  double density = 0.0;  // K / b_K
  bool zero_density = false;  // density <= kZeroDensityLevel

  std::size_t K() const { return b.size(); }
  std::size_t blocks() const { return b.empty() ? 0 : b.size() - 1; }
  std::uint64_t gap(std::size_t k) const { return b[k + 1] - b[k]; }  // 0-based block index
};

inline constexpr double kZeroDensityLevel = 0.01;

/// b_k = k^d.
struct Poly {
  unsigned degree = 2;
};
/// b_k = floor(r^{k-1}), bumped to b_{k-1} + 1 when that is not larger.
struct Geometric {
  double ratio = 2.0;
};
/// The given list (its first K entries; all of it when K = 0).
struct Explicit {
  std::vector<std::uint64_t> b;
};
using BlockRule = std::variant<Poly, Geometric, Explicit>;

// Throws InvalidArgument for a non-increasing list, b_1 = 0, or overflow.
BlockStructure make_blocks(const BlockRule& rule, std::size_t k);
BlockStructure make_blocks(std::vector<std::uint64_t> b);

struct MomoResult {
  double value = 0.0;
  std::vector<Complex> block_sums;  // S_k, k = 1..K-1
};

// Preconditions: points.size() == K - 1, K >= 2, and u known up to b_K - 1.
// Throws InvalidArgument (InsufficientData for a short prefix) otherwise.
MomoResult momo_detail(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                       const BlockStructure& blocks, std::span<const TorusPoint> points);
double momo_value(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                  const BlockStructure& blocks, std::span<const TorusPoint> points);

MomoResult momo_log_detail(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                           const BlockStructure& blocks, std::span<const TorusPoint> points);
double momo_log_value(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                      const BlockStructure& blocks, std::span<const TorusPoint> points);

struct AdversarialResult {
  std::vector<TorusPoint> points;
  double value = 0.0;
};

// Per block, draws trials uniform start points (stream = block index) and
// keeps the one with the largest |S_k|; the first maximizer wins ties.
AdversarialResult adversarial_points(const BoundedSequence& u, const SystemSpec& spec,
                                     const Observable& f, const BlockStructure& blocks,
                                     std::size_t trials, std::uint64_t seed);

struct WedgeMomoResult {
  double value = 0.0;
  double core = 0.0;  // (1/b_K) sum of |S_k| over blocks starting in a core component
  double tail = 0.0;  // the rest: start at x0 or in a component where f is constant
  std::vector<bool> in_core;
  std::vector<Complex> block_sums;
};

WedgeMomoResult wedge_momo(const BoundedSequence& u, const SystemSpec& spec,
                           const systems::WedgeObservable& f, const BlockStructure& blocks,
                           std::span<const systems::WedgePoint> points);

}  // namespace orthodyn::momo
