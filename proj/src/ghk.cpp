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

#include "orthodyn/ghk.hpp"

#include <cmath>
#include <numeric>

namespace orthodyn::ghk {

namespace {

double harmonic(std::size_t n) {
  return blocked_sum<double>(n, [](std::size_t i) { return 1.0 / static_cast<double>(i + 1); });
}

void require_prefix(std::size_t available, std::size_t needed, const char* what) {
  if (available < needed) {
    throw InsufficientData(std::string(what) + ": needs a prefix of length " + std::to_string(needed) +
                           ", have " + std::to_string(available));
  }
}

GhkEstimate finish(Complex raw, int s, std::size_t n, std::vector<std::size_t> levels, Averaging mode) {
  GhkEstimate est;
  est.raw = raw;
  est.s = s;
  est.N = n;
  est.H = levels.empty() ? 0 : levels.front();
  est.levels = std::move(levels);
  est.mode = mode;
  est.value = std::pow(std::max(raw.real(), 0.0), 1.0 / std::ldexp(1.0, s));
  return est;
}

// (1/H) sum_{h'=1}^H of the (weighted) correlation of v at lag h', using the
// window sums W(n) = sum_{h'=1}^H v(n+h'). v(i) is produced by the accessor so
// the innermost shift product never has to be materialized.
template <typename Access>
Complex inner_u1(Access v, std::size_t n, std::size_t h, Averaging mode, double norm) {
  constexpr std::size_t kBlock = 4096;
  const bool weighted = mode == Averaging::logarithmic;
  std::vector<Complex> blocks((n + kBlock - 1) / kBlock);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    // Window restarted exactly at each block start to bound drift.
    Complex window = 0.0;
    for (std::size_t j = lo + 1; j <= lo + h; ++j) window += v(j);
    Complex acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      Complex t = v(i) * std::conj(window);
      if (weighted) t /= static_cast<double>(i + 1);
      acc += t;
      window += v(i + h + 1) - v(i + 1);
    }
    blocks[b] = acc;
  }
  return pairwise_sum(std::span<const Complex>(blocks)) / (norm * static_cast<double>(h));
}

Complex raw_power(std::span<const Complex> u, std::size_t n, std::span<const std::size_t> levels,
                  Averaging mode, double norm, bool parallel) {
  if (levels.size() == 1) {
    return inner_u1([u](std::size_t i) { return u[i]; }, n, levels[0], mode, norm);
  }
  const std::size_t h_outer = levels[0];
  const auto rest = levels.subspan(1);
  std::vector<Complex> parts(h_outer);
  auto one = [&](std::size_t idx) {
    const std::size_t h = idx + 1;
    if (rest.size() == 1) {
      parts[idx] = inner_u1([u, h](std::size_t i) { return u[i + h] * std::conj(u[i]); }, n,
                            rest[0], mode, norm);
      return;
    }
    std::vector<Complex> shifted(u.size() - h);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = u[i + h] * std::conj(u[i]);
    parts[idx] = raw_power(shifted, n, rest, mode, norm, false);
  };
  if (parallel) {
    parallel_for(h_outer, one);
  } else {
    for (std::size_t i = 0; i < h_outer; ++i) one(i);
  }
  return pairwise_sum(std::span<const Complex>(parts)) / static_cast<double>(h_outer);
}

}  // namespace

std::size_t default_h(std::size_t n) {
  auto h = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-9));
  return std::max<std::size_t>(h, 1);
}

double log_weight_total(std::size_t n) {
  if (n < 2) throw InvalidArgument("log_weight_total: N must be at least 2");
  return harmonic(n) / std::log(static_cast<double>(n));
}

Complex corr(const BoundedSequence& u, std::size_t h, std::size_t n, const Options& opts) {
  if (n == 0) throw InvalidArgument("corr: N must be positive");
  require_prefix(u.size(), n + h, "corr");
  const auto v = u.values();
  if (opts.two_sided) {
    if (opts.mode == Averaging::logarithmic) {
      throw InvalidArgument("corr: two-sided averaging is Cesaro only");
    }
    std::vector<Complex> terms(2 * n);
    const auto lo = -static_cast<std::int64_t>(n) + 1;
    for (std::int64_t m = lo; m <= static_cast<std::int64_t>(n); ++m) {
      terms[static_cast<std::size_t>(m - lo)] =
          u.two_sided(m) * std::conj(u.two_sided(m + static_cast<std::int64_t>(h)));
    }
    return pairwise_sum(terms) / static_cast<double>(2 * n);
  }
  if (opts.mode == Averaging::logarithmic) {
    return blocked_sum<Complex>(n, [v, h](std::size_t i) {
             return v[i] * std::conj(v[i + h]) / static_cast<double>(i + 1);
           }) /
           harmonic(n);
  }
  return blocked_sum<Complex>(n, [v, h](std::size_t i) { return v[i] * std::conj(v[i + h]); }) /
         static_cast<double>(n);
}

std::vector<Complex> correlations(const BoundedSequence& u, std::size_t h_max, std::size_t n,
                                  const Options& opts) {
  require_prefix(u.size(), n + h_max, "correlations");
  std::vector<Complex> c(h_max + 1);
  parallel_for(h_max + 1, [&](std::size_t h) { c[h] = corr(u, h, n, opts); });
  return c;
}

Complex modulated_mean(std::span<const Complex> c, double theta, std::size_t h) {
  if (h == 0) throw InvalidArgument("averaging length H must be positive");
  if (c.size() < h + 1) throw InvalidArgument("modulated_mean: need c[0..H]");
  std::vector<Complex> terms(h);
  for (std::size_t k = 1; k <= h; ++k) terms[k - 1] = unit(frac_mul(theta, k)) * c[k];
  return pairwise_sum(terms) / static_cast<double>(h);
}

GhkEstimate u1_lambda_sq(const BoundedSequence& u, double theta, std::size_t n, std::size_t h,
                         const Options& opts) {
  if (h == 0) throw InvalidArgument("u1: H must be positive");
  if (opts.max_h_ratio > 0.0 && static_cast<double>(h) > opts.max_h_ratio * static_cast<double>(n)) {
    throw InvalidArgument("u1: H = " + std::to_string(h) + " exceeds " +
                          std::to_string(opts.max_h_ratio) + " * N");
  }
  const auto c = correlations(u, h, n, opts);
  return finish(modulated_mean(c, theta, h), 1, n, {h}, opts.mode);
}

GhkEstimate u1_sq(const BoundedSequence& u, std::size_t n, std::size_t h, const Options& opts) {
  return u1_lambda_sq(u, 0.0, n, h, opts);
}

GhkEstimate us_norm(const BoundedSequence& u, int s, std::size_t n,
                    std::span<const std::size_t> levels, const Options& opts) {
  if (s < 2 || s > 3) throw InvalidArgument("us_norm: order s must be 2 or 3");
  if (levels.size() != static_cast<std::size_t>(s)) {
    throw InvalidArgument("us_norm: need one averaging length per level");
  }
  if (n == 0) throw InvalidArgument("us_norm: N must be positive");
  if (opts.two_sided) throw InvalidArgument("us_norm: two-sided averaging is not supported");
  for (auto h : levels) {
    if (h == 0) throw InvalidArgument("us_norm: averaging lengths must be positive");
  }
  const std::size_t shifts = std::accumulate(levels.begin(), levels.end(), std::size_t{0});
  require_prefix(u.size(), n + shifts, "us_norm (nested shifts)");
  const double norm = opts.mode == Averaging::logarithmic ? harmonic(n) : static_cast<double>(n);
  const Complex raw = raw_power(u.values(), n, levels, opts.mode, norm, true);
  return finish(raw, s, n, std::vector<std::size_t>(levels.begin(), levels.end()), opts.mode);
}

GhkEstimate us_norm(const BoundedSequence& u, int s, std::size_t n, std::size_t h,
                    const Options& opts) {
  const std::vector<std::size_t> levels(static_cast<std::size_t>(std::max(s, 0)), h);
  return us_norm(u, s, n, levels, opts);
}

GhkEstimate log_variant(Op op, const BoundedSequence& u, const LogParams& params) {
  Options opts;
  opts.mode = Averaging::logarithmic;
  switch (op) {
    case Op::u1:
      return u1_sq(u, params.N, params.H, opts);
    case Op::u1_lambda:
      return u1_lambda_sq(u, params.theta, params.N, params.H, opts);
    case Op::us:
      return us_norm(u, params.s, params.N, params.H, opts);
  }
  throw InvalidArgument("log_variant: unknown operation");
}

}  // namespace orthodyn::ghk
