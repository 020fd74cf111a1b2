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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "orthodyn/common.hpp"

namespace orthodyn::sequences {

/// Finite prefix u(1..N) of a sequence in the closed unit disc.
///
/// Indexing is 1-based through operator(); values() exposes the underlying
/// 0-based storage. The sequence also answers for non-positive indices through
/// the two-sided convention u(-m) = u(m), u(0) = 1 (see two_sided()).
class BoundedSequence {
 public:
  BoundedSequence() = default;
  // Throws InvalidArgument if some |value| > 1 + 1e-12.
  BoundedSequence(std::vector<Complex> values, std::string label, bool integral = false);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::string& label() const { return label_; }
  // True when every value is a real integer (in {-1, 0, 1}); selects the i8
  // cache payload.
  bool integral() const { return integral_; }

  const Complex& operator()(std::size_t n) const { return values_[n - 1]; }
  std::span<const Complex> values() const { return values_; }

  // u(m) for m >= 1, u(-m) for m <= -1 and 1 for m = 0. Throws
  // InsufficientData if |m| > size().
  Complex two_sided(std::int64_t m) const;

  // Pointwise product with another sequence (length = shorter of the two).
  BoundedSequence times(const BoundedSequence& other, std::string label) const;
  // c * u for |c| <= 1.
  BoundedSequence scaled(Complex c) const;
  // The first n entries.
  BoundedSequence prefix(std::size_t n) const;

 private:
  std::vector<Complex> values_;
  std::string label_;
  bool integral_ = false;
};

Complex two_sided(const BoundedSequence& u, std::int64_t m);

inline constexpr std::uint64_t kMaxSieveLength = std::uint64_t{1} << 40;
inline constexpr std::size_t kSegmentLength = std::size_t{1} << 20;

// Möbius function mu(1..N) by a segmented sieve.
BoundedSequence mobius(std::uint64_t n);
// Liouville function (-1)^Omega(n) for n = 1..N.
BoundedSequence liouville(std::uint64_t n);

// Raw sieve output as small integers; mobius()/liouville() wrap these.
std::vector<std::int8_t> mobius_values(std::uint64_t n);
std::vector<std::int8_t> liouville_values(std::uint64_t n);

/// values[n] = e(c_0 + c_1 n + ... + c_d n^d), d <= 4. Each monomial is
/// reduced mod 1 exactly from the binary value of its coefficient before
/// exponentiation, so large n lose no phase precision.
BoundedSequence phase_sequence(std::span<const double> coeffs, std::size_t n);

// Phase (in [0,1)) of the polynomial at integer n, reduced mod 1.
double polynomial_phase(std::span<const double> coeffs, std::uint64_t n);

// i.i.d. +-1 signs; entry n depends only on (seed, n).
BoundedSequence random_signs(std::size_t n, std::uint64_t seed);

// Constant sequence u = c.
BoundedSequence constant(Complex c, std::size_t n);

// (1/2) e(n alpha) + (1/2) e(n beta).
BoundedSequence two_atom(double alpha, double beta, std::size_t n);

// Concatenation: first.prefix(split) followed by second on split+1..n.
BoundedSequence concatenate(const BoundedSequence& first, const BoundedSequence& second,
                            std::size_t split);

// Binary cache file "ODSQ1" + u64 N + kind tag + payload.
void write_cache(const BoundedSequence& u, const std::filesystem::path& path);
BoundedSequence read_cache(const std::filesystem::path& path, std::string label = "cache");

}  // namespace orthodyn::sequences
