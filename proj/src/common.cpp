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

#include "orthodyn/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace orthodyn {

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

namespace {

// Fractional part of |c| * m, c finite and nonzero.
long double frac_mul_abs(double c, u128 m) {
  int exp = 0;
  const double mant = std::frexp(std::fabs(c), &exp);  // |c| = mant * 2^exp
  const auto digits = static_cast<std::uint64_t>(std::ldexp(mant, 53));
  const int frac_bits = 53 - exp;  // |c| = digits * 2^-frac_bits
  if (frac_bits <= 0) return 0.0L;
  if (frac_bits <= 128) {
    // Only the low frac_bits bits of digits * m matter, and wrapping u128
    // multiplication keeps them exact.
    u128 r = static_cast<u128>(digits) * m;
    if (frac_bits < 128) r &= (static_cast<u128>(1) << frac_bits) - 1;
    // Keep the 64 leading bits of the fraction.
    if (frac_bits > 64) {
      return std::ldexp(static_cast<long double>(static_cast<std::uint64_t>(r >> (frac_bits - 64))), -64);
    }
    return std::ldexp(static_cast<long double>(static_cast<std::uint64_t>(r)), -frac_bits);
  }
  const long double prod = static_cast<long double>(std::fabs(c)) * static_cast<long double>(m);
  return prod - std::floor(prod);
}

}  // namespace

double frac_mul(double c, u128 m) {
  if (c == 0.0 || m == 0) return 0.0;
  if (!std::isfinite(c)) throw InvalidArgument("frac_mul: non-finite coefficient");
  double f = static_cast<double>(frac_mul_abs(c, m));
  if (f >= 1.0) f = 0.0;
  if (c < 0.0 && f != 0.0) f = 1.0 - f;
  return f >= 1.0 ? 0.0 : f;
}

long double frac_mul_long(double c, u128 m) {
  if (c == 0.0 || m == 0) return 0.0L;
  if (!std::isfinite(c)) throw InvalidArgument("frac_mul: non-finite coefficient");
  long double f = frac_mul_abs(c, m);
  if (c < 0.0 && f != 0.0L) f = 1.0L - f;
  return f >= 1.0L ? 0.0L : f;
}

Complex unit(double theta) {
  double t = theta - std::round(theta);  // [-1/2, 1/2]
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

namespace {

template <typename T>
T pairwise_impl(std::span<const T> xs) {
  constexpr std::size_t kLeaf = 32;
  if (xs.size() <= kLeaf) {
    T acc{};
    for (const T& x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_impl(xs.first(half)) + pairwise_impl(xs.subspan(half));
}

unsigned initial_threads() {
  if (const char* env = std::getenv("ORTHODYN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{initial_threads()};
  return n;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_impl(xs); }
Complex pairwise_sum(std::span<const Complex> xs) { return pairwise_impl(xs); }

unsigned thread_count() { return thread_setting().load(); }

void set_thread_count(unsigned n) { thread_setting().store(n == 0 ? 1 : n); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
  return splitmix(splitmix(seed_ ^ splitmix(stream)) + counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace orthodyn
