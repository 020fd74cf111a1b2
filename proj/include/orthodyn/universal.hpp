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

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "orthodyn/common.hpp"
#include "orthodyn/momo.hpp"
#include "orthodyn/sequences.hpp"
#include "orthodyn/systems.hpp"

/// The automorphism A(y, v, z) = (y, v, y + z) of T^d x T^d x T^d, the
/// fiber-Haar lift of a measure on (y, v), and the one-frequency reduction of
/// character sums along A2^t orbits.
namespace orthodyn::universal {

using systems::TorusPoint;

inline constexpr std::size_t kMaxDimension = 64;
inline constexpr std::int64_t kMaxFrequency = 1000;
inline constexpr std::uint64_t kDefaultFiberSteps = 1'000'000;

struct UniversalState {
  TorusPoint y, v, z;

  std::size_t dimension() const { return y.dimension(); }
};

// Throws InvalidArgument unless the three points share a dimension in
// [1, kMaxDimension] and every coordinate lies in [0, 1).
UniversalState make_state(TorusPoint y, TorusPoint v, TorusPoint z);

/// F(y, v, z) = e(m1.y + m2.v + m3.z).
struct CharacterTriple {
  std::vector<std::int64_t> m1, m2, m3;

  std::size_t dimension() const { return m1.size(); }
};

// Throws InvalidArgument for unequal lengths or an entry above kMaxFrequency.
CharacterTriple make_character(std::vector<std::int64_t> m1, std::vector<std::int64_t> m2,
                               std::vector<std::int64_t> m3);

UniversalState apply_A(const UniversalState& s);
// A^n s in closed form: z + n y, reduced exactly.
UniversalState apply_A_power(const UniversalState& s, std::uint64_t n);

Complex evaluate(const CharacterTriple& f, const UniversalState& s);
// F(A^n s) with the phase carried in long double, so no rounding of A^n s to
// double enters.
Complex evaluate_after(const CharacterTriple& f, const UniversalState& s, std::uint64_t n);
// chi_3(y) = e(m3.y).
Complex chi3(const CharacterTriple& f, const TorusPoint& y);

/// Law of one coordinate in a product measure.
struct PointLaw {
  double value = 0.0;
};
struct UniformLaw {};
using CoordinateLaw = std::variant<PointLaw, UniformLaw>;

struct PointMass {
  TorusPoint y0, v0;
};
struct ProductLaw {
  std::vector<CoordinateLaw> y, v;
};
struct Empirical {
  std::vector<TorusPoint> ys, vs;  // paired: sample i is (ys[i], vs[i])
};

/// A probability on T^d x T^d. Sample i depends only on (seed, i).
struct EtaSampler {
  std::variant<PointMass, ProductLaw, Empirical> kind;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

// Validate dimensions and coordinates; set d.
EtaSampler point_mass(TorusPoint y0, TorusPoint v0, std::uint64_t seed = 0);
EtaSampler product_law(std::vector<CoordinateLaw> y, std::vector<CoordinateLaw> v, std::uint64_t seed);
EtaSampler empirical(std::vector<TorusPoint> ys, std::vector<TorusPoint> vs, std::uint64_t seed);

// The (y, v) of sample i.
std::pair<TorusPoint, TorusPoint> eta_sample(const EtaSampler& eta, std::uint64_t index);
// Sample i of eta-tilde: (y, v) from eta and z = s y mod 1 with s uniform on
// {0, ..., S-1}. Throws InvalidArgument for S = 0.
UniversalState eta_tilde_sample(const EtaSampler& eta, std::uint64_t index,
                                std::uint64_t fiber_steps = kDefaultFiberSteps);

struct WzorsRow {
  std::uint64_t n = 0;
  Complex empirical;
  Complex analytic;
  double discrepancy = 0.0;
};

struct WzorsReport {
  std::vector<WzorsRow> rows;  // n = 0..n_max
  double max_discrepancy = 0.0;
  std::size_t samples = 0;
  std::uint64_t fiber_steps = 0;
};

// Empirical (1/M) sum_w F(A^n w) conj F(w) over M samples of eta-tilde
// against the n-th Fourier coefficient of the law of chi_3(y): exact for point
// masses and product laws, the average over the same samples otherwise.
// Throws InvalidArgument for M = 0 or a dimension mismatch.
WzorsReport spectral_wzors_check(const CharacterTriple& f, const EtaSampler& eta, std::uint64_t n_max,
                                 std::size_t samples, std::uint64_t fiber_steps = kDefaultFiberSteps);

struct A2Reduction {
  std::vector<double> lhs;  // |sum_n chi(R^n p_k) u(n)| per block
  std::vector<double> rhs;  // |sum_n e(n sum_j beta_j x_j^(k)) u(n)| per block
  double max_residual = 0.0;
};

// R = A2^t on pairs (x_j, y_j); points[k] lists x_1, y_1, ..., x_t, y_t for
// block k, and chi has frequencies alpha_j on x_j and beta_j on y_j. The
// orbit is iterated in closed form to b_k and stepped inside the block.
// Throws InvalidArgument on size mismatches, InsufficientData if u is
// shorter than b_K - 1.
A2Reduction a2_reduction_identity(std::span<const std::int64_t> alpha, std::span<const std::int64_t> beta,
                                  const momo::BlockStructure& blocks, std::span<const TorusPoint> points,
                                  const sequences::BoundedSequence& u);

}  // namespace orthodyn::universal
