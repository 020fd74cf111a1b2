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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "orthodyn/common.hpp"

/// k-block surrogates of the d-bar distance.
///
/// A shift-invariant measure is represented by its k-block distribution and
/// two measures are compared through optimal transport between those
/// distributions with cost (1/k) * sum_t d(a_t, b_t), d the discrete metric
/// unless a symbol metric is given. The plan is a coupling of the k-block
/// marginals with no shift-invariance constraint, so dbar_k is a relaxation
/// of the joining infimum, not the distance itself.
namespace orthodyn::dbar {

struct BlockDistribution {
  unsigned A = 2;  // alphabet size
  unsigned k = 1;  // block length
  // p[i] for the block whose base-A digits (first symbol most significant)
  // spell i.
  std::vector<double> p;
  // max over (k-1)-blocks of |left marginal - right marginal|
  double residual = 0.0;

  std::size_t size() const { return p.size(); }
};

// Validates sum p = 1 +- 1e-12, p >= 0, p.size() = A^k; records the residual.
BlockDistribution make_distribution(unsigned A, unsigned k, std::vector<double> p);

double shift_residual(unsigned A, unsigned k, std::span<const double> p);

// Sliding-window k-block frequencies over the windows starting at n = 1..N-k+1
// of symbols[0..N). Requires k <= 8, A^k <= 2^20, k <= N <= symbols.size().
BlockDistribution empirical_blocks(std::span<const int> symbols, unsigned A, unsigned k, std::size_t n);

// Product measure on {0, 1}^k with P(1) = p.
BlockDistribution bernoulli_blocks(double p, unsigned k);

std::string block_label(std::size_t index, unsigned A, unsigned k);
std::size_t block_index(const std::string& label, unsigned A);

// CSV with header "block,prob"; blocks as base-A digit strings (A <= 36).
void write_csv(const BlockDistribution& d, std::ostream& os);
BlockDistribution read_csv(std::istream& is, unsigned A);

enum class Solver { automatic, exact, entropic };

struct PlanEntry {
  std::size_t from = 0;  // block index in P
  std::size_t to = 0;    // block index in Q
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;  // positive masses only
  double cost = 0.0;
  Solver solver = Solver::exact;
  double epsilon = 0.0;  // final regularization (entropic only)
  bool converged = true;
  std::size_t iterations = 0;
};

// Largest |row sum - p| or |column sum - q| of the plan.
double marginal_error(const TransportPlan& plan, std::span<const double> p, std::span<const double> q);

inline constexpr std::size_t kExactLimit = 512;

struct Options {
  // automatic: exact when A^k <= kExactLimit, entropic otherwise.
  Solver solver = Solver::automatic;
  // Row-major A x A symbol metric with values in [0, 1]; empty = discrete.
  std::vector<double> symbol_metric;
  double epsilon_start = 0.1;
  double epsilon_end = 1e-3;
  std::size_t epsilon_stages = 5;
  std::size_t max_iterations = 10000;  // per stage
  // Throw NonConvergence instead of returning a plan flagged not converged.
  bool strict = false;
};

struct DbarResult {
  double value = 0.0;
  TransportPlan plan;
};

// Throws InvalidArgument when A or k differ.
DbarResult dbar_k(const BlockDistribution& P, const BlockDistribution& Q, const Options& opts = {});

// Transportation problem min <C, X> over X >= 0 with row sums a and column
// sums b (cost row-major, a.size() x b.size()). The exact solver is a
// transportation simplex started from the northwest corner with Bland's rule
// (lowest row-major index enters, lowest index leaves on ties).
TransportPlan solve_exact(std::span<const double> a, std::span<const double> b, std::span<const double> cost);
// Log-domain Sinkhorn with geometric epsilon annealing, then rounding onto
// the transport polytope; the reported cost is that of the rounded plan.
TransportPlan solve_entropic(std::span<const double> a, std::span<const double> b,
                             std::span<const double> cost, const Options& opts = {});

struct CurvePoint {
  unsigned k = 0;
  double value = 0.0;
};

// dbar_k of the empirical k-block distributions of the first N symbols,
// k = 1..k_max; the k values run in parallel.
std::vector<CurvePoint> dbar_curve(std::span<const int> u, std::span<const int> v, unsigned A,
                                   unsigned k_max, std::size_t n, const Options& opts = {});

struct LscReport {
  std::vector<double> values;  // dbar_k(nu_t, nu') along the family
  double limit_value = 0.0;    // dbar_k(nu, nu')
  double tail_inf = 0.0;       // min over the second half of the family
  std::vector<double> deviations;  // |values[t] - limit_value|
  bool ok = false;             // limit_value <= tail_inf + 1e-6
};

LscReport lsc_probe(std::span<const BlockDistribution> family, const BlockDistribution& limit,
                    const BlockDistribution& other, const Options& opts = {});

}  // namespace orthodyn::dbar
