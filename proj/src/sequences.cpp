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

#include "orthodyn/sequences.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

namespace orthodyn::sequences {

BoundedSequence::BoundedSequence(std::vector<Complex> values, std::string label, bool integral)
    : values_(std::move(values)), label_(std::move(label)), integral_(integral) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(std::abs(values_[i]) <= 1.0 + 1e-12)) {
      throw InvalidArgument("sequence '" + label_ + "': |u(" + std::to_string(i + 1) +
                            ")| exceeds 1");
    }
  }
}

Complex BoundedSequence::two_sided(std::int64_t m) const {
  if (m == 0) return 1.0;
  const auto idx = static_cast<std::size_t>(m < 0 ? -m : m);
  if (idx > values_.size()) {
    throw InsufficientData("two_sided: index " + std::to_string(m) + " outside prefix of length " +
                           std::to_string(values_.size()));
  }
  return values_[idx - 1];
}

BoundedSequence BoundedSequence::times(const BoundedSequence& other, std::string label) const {
  const std::size_t n = std::min(size(), other.size());
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = values_[i] * other.values_[i];
  return BoundedSequence(std::move(out), std::move(label), integral_ && other.integral_);
}

BoundedSequence BoundedSequence::scaled(Complex c) const {
  std::vector<Complex> out(values_);
  for (auto& v : out) v *= c;
  return BoundedSequence(std::move(out), label_ + "*c");
}

BoundedSequence BoundedSequence::prefix(std::size_t n) const {
  n = std::min(n, size());
  return BoundedSequence(std::vector<Complex>(values_.begin(), values_.begin() + n), label_,
                         integral_);
}

Complex two_sided(const BoundedSequence& u, std::int64_t m) { return u.two_sided(m); }

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint64_t> base_primes(std::uint64_t limit) {
  std::vector<char> mark(limit + 1, 1);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (!mark[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) mark[j] = 0;
  }
  return primes;
}

enum class Sieve { mobius, liouville };

// Sieves [lo, hi) into out[0 .. hi-lo).
void sieve_segment(Sieve kind, std::uint64_t lo, std::uint64_t hi,
                   std::span<const std::uint64_t> primes, std::span<std::int8_t> out) {
  const std::size_t len = hi - lo;
  std::vector<std::uint64_t> rem(len);
  for (std::size_t j = 0; j < len; ++j) rem[j] = lo + j;
  std::fill(out.begin(), out.end(), std::int8_t{1});

  for (const std::uint64_t p : primes) {
    if (p * p >= hi) break;
    if (kind == Sieve::mobius) {
      for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
        rem[m - lo] /= p;
        out[m - lo] = static_cast<std::int8_t>(-out[m - lo]);
      }
      const std::uint64_t sq = p * p;
      for (std::uint64_t m = (lo + sq - 1) / sq * sq; m < hi; m += sq) out[m - lo] = 0;
    } else {
      for (std::uint64_t q = p; q < hi; q *= p) {
        for (std::uint64_t m = (lo + q - 1) / q * q; m < hi; m += q) {
          rem[m - lo] /= p;
          out[m - lo] = static_cast<std::int8_t>(-out[m - lo]);
        }
        if (q > (hi - 1) / p) break;
      }
    }
  }
  // What survives is 1 or a single prime above sqrt(hi).
  for (std::size_t j = 0; j < len; ++j) {
    if (rem[j] > 1) out[j] = static_cast<std::int8_t>(-out[j]);
  }
}

std::vector<std::int8_t> run_sieve(Sieve kind, std::uint64_t n) {
  if (n > kMaxSieveLength) throw InvalidArgument("sieve length exceeds 2^40");
  std::vector<std::int8_t> values(n);
  if (n == 0) return values;
  const auto primes = base_primes(isqrt(n) + 1);
  const std::uint64_t segments = (n + kSegmentLength - 1) / kSegmentLength;
  parallel_for(segments, [&](std::size_t s) {
    const std::uint64_t lo = 1 + s * kSegmentLength;
    const std::uint64_t hi = std::min<std::uint64_t>(n + 1, lo + kSegmentLength);
    sieve_segment(kind, lo, hi, primes, std::span(values).subspan(lo - 1, hi - lo));
  });
  return values;
}

BoundedSequence from_int8(const std::vector<std::int8_t>& raw, std::string label) {
  std::vector<Complex> values(raw.size());
  std::transform(raw.begin(), raw.end(), values.begin(),
                 [](std::int8_t v) { return Complex(v, 0.0); });
  return BoundedSequence(std::move(values), std::move(label), true);
}

}  // namespace

std::vector<std::int8_t> mobius_values(std::uint64_t n) { return run_sieve(Sieve::mobius, n); }
std::vector<std::int8_t> liouville_values(std::uint64_t n) {
  return run_sieve(Sieve::liouville, n);
}

BoundedSequence mobius(std::uint64_t n) { return from_int8(mobius_values(n), "mobius"); }
BoundedSequence liouville(std::uint64_t n) { return from_int8(liouville_values(n), "liouville"); }

double polynomial_phase(std::span<const double> coeffs, std::uint64_t n) {
  double total = 0.0;
  u128 power = 1;  // n^j mod 2^128; frac_mul only needs the low bits
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    total += j == 0 ? frac(coeffs[0]) : frac_mul(coeffs[j], power);
    power *= n;
  }
  return frac(total);
}

BoundedSequence phase_sequence(std::span<const double> coeffs, std::size_t n) {
  if (coeffs.empty() || coeffs.size() > 5) {
    throw InvalidArgument("phase_sequence: need 1..5 coefficients (degree <= 4)");
  }
  std::vector<Complex> values(n);
  parallel_for((n + kSegmentLength - 1) / kSegmentLength, [&](std::size_t s) {
    const std::size_t lo = s * kSegmentLength;
    const std::size_t hi = std::min(n, lo + kSegmentLength);
    for (std::size_t i = lo; i < hi; ++i) values[i] = unit(polynomial_phase(coeffs, i + 1));
  });
  std::string label = "phase:";
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (j) label += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", coeffs[j]);
    label += buf;
  }
  return BoundedSequence(std::move(values), std::move(label));
}

BoundedSequence random_signs(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<Complex> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = (rng.bits(0, i + 1) >> 63) ? 1.0 : -1.0;
  }
  return BoundedSequence(std::move(values), "random:" + std::to_string(seed), true);
}

BoundedSequence constant(Complex c, std::size_t n) {
  const bool integral = c.imag() == 0.0 && std::round(c.real()) == c.real();
  return BoundedSequence(std::vector<Complex>(n, c), "const", integral);
}

BoundedSequence two_atom(double alpha, double beta, std::size_t n) {
  std::vector<Complex> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = 0.5 * unit(frac_mul(alpha, i + 1)) + 0.5 * unit(frac_mul(beta, i + 1));
  }
  return BoundedSequence(std::move(values), "two_atom");
}

BoundedSequence concatenate(const BoundedSequence& first, const BoundedSequence& second,
                            std::size_t split) {
  if (split > first.size()) throw InvalidArgument("concatenate: split beyond first sequence");
  const std::size_t n = std::max(split, second.size());
  std::vector<Complex> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = i < split ? first.values()[i] : second.values()[i];
  return BoundedSequence(std::move(values), first.label() + "|" + second.label(),
                         first.integral() && second.integral());
}

namespace {
constexpr std::array<char, 5> kMagic = {'O', 'D', 'S', 'Q', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &d, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is) {
  const std::uint64_t bits = get_u64(is);
  double d = 0.0;
  std::memcpy(&d, &bits, 8);
  return d;
}
}  // namespace

void write_cache(const BoundedSequence& u, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open cache file for writing: " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_u64(os, u.size());
  const std::uint8_t kind = u.integral() ? 0 : 1;
  os.put(static_cast<char>(kind));
  if (kind == 0) {
    std::vector<char> payload(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      payload[i] = static_cast<char>(static_cast<std::int8_t>(u.values()[i].real()));
    }
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  } else {
    for (const Complex& v : u.values()) {
      put_f64(os, v.real());
      put_f64(os, v.imag());
    }
  }
  if (!os) throw Error("failed writing cache file: " + path.string());
}

BoundedSequence read_cache(const std::filesystem::path& path, std::string label) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open cache file: " + path.string());
  std::array<char, 5> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error("bad cache magic in " + path.string());
  const std::uint64_t n = get_u64(is);
  const int kind = is.get();
  if (!is || (kind != 0 && kind != 1)) throw Error("bad cache payload kind in " + path.string());
  std::vector<Complex> values(n);
  if (kind == 0) {
    std::vector<char> payload(n);
    is.read(payload.data(), static_cast<std::streamsize>(n));
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<std::int8_t>(payload[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      values[i] = {re, im};
    }
  }
  if (!is) throw Error("truncated cache file: " + path.string());
  return BoundedSequence(std::move(values), std::move(label), kind == 0);
}

}  // namespace orthodyn::sequences
