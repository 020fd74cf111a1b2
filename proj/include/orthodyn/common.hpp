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

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orthodyn {

using Complex = std::complex<double>;
using u128 = unsigned __int128;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The requested average needs more of the sequence than is available.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// An iterative solver stopped at its iteration cap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Fractional part of c * m in [0, 1), computed from the exact binary value of
// c. Exact up to the final rounding to double whenever c has at most 128
// fractional bits (every double in [2^-75, 2^53) qualifies).
double frac_mul(double c, u128 m);
// The same with the 64-bit fraction kept in long double.
long double frac_mul_long(double c, u128 m);

// Fractional part of x in [0, 1).
double frac(double x);

// e(theta) = exp(2 pi i theta). theta is reduced mod 1 first.
Complex unit(double theta);

// Pairwise (tree) summation in a fixed order: bit-stable for a given input.
double pairwise_sum(std::span<const double> xs);
Complex pairwise_sum(std::span<const Complex> xs);

// Sums term(i) for i in [0, n): sequential within leaf blocks of 1024, then a
// pairwise tree over the block sums. Same order on every call.
template <typename T, typename Term>
T blocked_sum(std::size_t n, Term&& term) {
  constexpr std::size_t kBlock = 1024;
  std::vector<T> blocks((n + kBlock - 1) / kBlock);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t hi = std::min(n, (b + 1) * kBlock);
    T acc{};
    for (std::size_t i = b * kBlock; i < hi; ++i) acc += term(i);
    blocks[b] = acc;
  }
  return pairwise_sum(std::span<const T>(blocks));
}

// Thread count used by parallel_for. Initialized from ORTHODYN_THREADS, else
// hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);

// Calls fn(i) for i in [0, count), possibly on several threads. fn must only
// write to slots owned by i; callers reduce afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Counter-based generator: the value for (stream, counter) does not depend on
// the order in which values are drawn.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace orthodyn
