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

#include <span>
#include <vector>

#include "orthodyn/common.hpp"
#include "orthodyn/sequences.hpp"

/// Finite-prefix estimators of the Gowers-Host-Kra seminorms u^1, u^1(lambda)
/// and u^s.
///
/// Every estimator replaces the inner limit over N by an average over the
/// prefix n = 1..N and the outer limit over H by h = 1..H; the caller owns
/// both lengths (default_h() gives the N^{1/3} schedule). Raw averages may be
/// negative at finite (N, H); value is max(Re raw, 0)^{1/2^s} and raw is kept.
namespace orthodyn::ghk {

using sequences::BoundedSequence;

enum class Averaging { cesaro, logarithmic };

struct Options {
  Averaging mode = Averaging::cesaro;
  // Average over the symmetric window n = -N+1..N using the two-sided
  // extension instead of n = 1..N. Cesaro mode only.
  bool two_sided = false;
  // Precondition H <= max_h_ratio * N for u^1 estimates; <= 0 disables it.
  double max_h_ratio = 0.1;
};

struct GhkEstimate {
  double value = 0.0;
  int s = 1;
  std::size_t H = 0;  // outermost averaging length
  std::size_t N = 0;
  Averaging mode = Averaging::cesaro;
  Complex raw;
  std::vector<std::size_t> levels;  // averaging length per level, outermost first
};

// floor(N^{1/3}), at least 1.
std::size_t default_h(std::size_t n);

// (1/log N) sum_{n<=N} 1/n.
double log_weight_total(std::size_t n);

// (1/N) sum_{n=1}^N u(n) conj(u(n+h)); logarithmic mode weights the terms by
// 1/n and normalizes by sum_{n<=N} 1/n. Throws InsufficientData when the
// prefix is shorter than N + h.
Complex corr(const BoundedSequence& u, std::size_t h, std::size_t n, const Options& opts = {});

// corr(u, h, N) for h = 0..h_max, h in parallel.
std::vector<Complex> correlations(const BoundedSequence& u, std::size_t h_max, std::size_t n,
                                  const Options& opts = {});

// (1/H) sum_{h=1}^H e(h theta) c[h]; c must have at least H+1 entries.
Complex modulated_mean(std::span<const Complex> c, double theta, std::size_t h);

GhkEstimate u1_sq(const BoundedSequence& u, std::size_t n, std::size_t h, const Options& opts = {});

// Modulated u^1: lambda = e(theta). With the correlation convention above,
// u = e(n alpha) has its mass at theta = alpha.
GhkEstimate u1_lambda_sq(const BoundedSequence& u, double theta, std::size_t n, std::size_t h,
                         const Options& opts = {});

// u^s for 2 <= s <= 3 through the shift-product recursion. levels[0] is the
// outermost averaging length, levels[s-1] the innermost u^1 length. Requires
// a prefix of length N + sum(levels).
GhkEstimate us_norm(const BoundedSequence& u, int s, std::size_t n,
                    std::span<const std::size_t> levels, const Options& opts = {});
GhkEstimate us_norm(const BoundedSequence& u, int s, std::size_t n, std::size_t h,
                    const Options& opts = {});

// The same estimators with logarithmic weights on the n-average.
enum class Op { u1, u1_lambda, us };
struct LogParams {
  std::size_t N = 0;
  std::size_t H = 0;
  double theta = 0.0;  // u1_lambda only
  int s = 2;           // us only
};
GhkEstimate log_variant(Op op, const BoundedSequence& u, const LogParams& params);

}  // namespace orthodyn::ghk
