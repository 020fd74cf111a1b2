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

#include "orthodyn/momo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace orthodyn::momo {

namespace {

void finish_structure(BlockStructure& s) {
  if (s.b.empty()) throw InvalidArgument("make_blocks: empty block structure");
  if (s.b.front() == 0) throw InvalidArgument("make_blocks: b_1 must be positive");
  for (std::size_t i = 1; i < s.b.size(); ++i) {
    if (s.b[i] <= s.b[i - 1]) {
      throw InvalidArgument("make_blocks: non-increasing at index " + std::to_string(i + 1));
    }
  }
  const std::size_t gaps = s.blocks();
  if (gaps >= 2) {
    const std::size_t q = std::clamp<std::size_t>(s.K() / 4, 1, gaps / 2);
    std::uint64_t first = std::numeric_limits<std::uint64_t>::max(), last = first;
    for (std::size_t k = 0; k < q; ++k) {
      first = std::min(first, s.gap(k));
      last = std::min(last, s.gap(gaps - 1 - k));
    }
    s.growth_ok = last > first;
  }
  s.density = static_cast<double>(s.K()) / static_cast<double>(s.b.back());
  s.zero_density = s.density <= kZeroDensityLevel;
}

void check_blocks(const BoundedSequence& u, const BlockStructure& blocks, std::size_t points) {
  if (blocks.K() < 2) throw InvalidArgument("momo: need at least two block endpoints");
  if (points != blocks.blocks()) {
    throw InvalidArgument("momo: need K - 1 = " + std::to_string(blocks.blocks()) + " start points, got " +
                          std::to_string(points));
  }
  if (blocks.b.back() - 1 > u.size()) {
    throw InvalidArgument("momo: b_K - 1 = " + std::to_string(blocks.b.back() - 1) +
                          " exceeds the prefix length " + std::to_string(u.size()));
  }
}

// sum_{j<g} w(b + j) f(T^j p).
template <typename Point, typename Obs>
Complex block_sum(const BoundedSequence& u, const SystemSpec& spec, const Obs& f, const Point& p,
                  std::uint64_t b, std::uint64_t g, bool harmonic) {
  const auto orbit = systems::orbit_observable(spec, p, f, g - 1);
  const Complex first = systems::evaluate(f, p);
  auto weight = [&](std::uint64_t n) { return harmonic ? u(n) / static_cast<double>(n) : u(n); };
  return blocked_sum<Complex>(g, [&](std::size_t j) {
    return weight(b + j) * (j == 0 ? first : orbit(j));
  });
}

double sum_abs(const std::vector<Complex>& sums) {
  std::vector<double> a(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) a[i] = std::abs(sums[i]);
  return pairwise_sum(a);
}

MomoResult run(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
               const BlockStructure& blocks, std::span<const TorusPoint> points, bool logarithmic) {
  if (spec.is_wedge()) throw InvalidArgument("momo: use wedge_momo for wedge systems");
  systems::check_compatible(spec, f);
  check_blocks(u, blocks, points.size());
  for (const auto& p : points) {
    if (p.dimension() != spec.dimension()) throw InvalidArgument("momo: start point dimension mismatch");
  }
  MomoResult r;
  r.block_sums.resize(blocks.blocks());
  parallel_for(blocks.blocks(), [&](std::size_t k) {
    const std::uint64_t b = blocks.b[k];
    const TorusPoint start = logarithmic ? systems::iterate(spec, points[k], b) : points[k];
    r.block_sums[k] = block_sum(u, spec, f, start, b, blocks.gap(k), logarithmic);
  });
  const double norm = logarithmic ? std::log(static_cast<double>(blocks.b.back()))
                                  : static_cast<double>(blocks.b.back());
  r.value = sum_abs(r.block_sums) / norm;
  return r;
}

}  // namespace

BlockStructure make_blocks(std::vector<std::uint64_t> b) {
  BlockStructure s;
  s.b = std::move(b);
  finish_structure(s);
  return s;
}

BlockStructure make_blocks(const BlockRule& rule, std::size_t k) {
  std::vector<std::uint64_t> b;
  constexpr double kLimit = 9.0e18;
  if (const auto* poly = std::get_if<Poly>(&rule)) {
    if (poly->degree == 0) throw InvalidArgument("make_blocks: polynomial degree must be positive");
    for (std::size_t i = 1; i <= k; ++i) {
      const double v = std::pow(static_cast<double>(i), poly->degree);
      if (v > kLimit) throw InvalidArgument("make_blocks: b_k overflows");
      std::uint64_t x = 1;
      for (unsigned d = 0; d < poly->degree; ++d) x *= i;
      b.push_back(x);
    }
  } else if (const auto* geo = std::get_if<Geometric>(&rule)) {
    if (!(geo->ratio > 1.0)) throw InvalidArgument("make_blocks: geometric ratio must exceed 1");
    for (std::size_t i = 0; i < k; ++i) {
      const double v = std::floor(std::pow(geo->ratio, static_cast<double>(i)));
      if (v > kLimit) throw InvalidArgument("make_blocks: b_k overflows");
      std::uint64_t x = static_cast<std::uint64_t>(v);
      if (!b.empty() && x <= b.back()) x = b.back() + 1;
      b.push_back(x);
    }
  } else {
    const auto& list = std::get<Explicit>(rule).b;
    if (k > list.size()) throw InvalidArgument("make_blocks: K exceeds the explicit list");
    b.assign(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k == 0 ? list.size() : k));
  }
  return make_blocks(std::move(b));
}

MomoResult momo_detail(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                       const BlockStructure& blocks, std::span<const TorusPoint> points) {
  return run(u, spec, f, blocks, points, false);
}

double momo_value(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                  const BlockStructure& blocks, std::span<const TorusPoint> points) {
  return momo_detail(u, spec, f, blocks, points).value;
}

MomoResult momo_log_detail(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                           const BlockStructure& blocks, std::span<const TorusPoint> points) {
  if (blocks.K() >= 1 && blocks.b.back() < 2) throw InvalidArgument("momo_log: need b_K >= 2");
  return run(u, spec, f, blocks, points, true);
}

double momo_log_value(const BoundedSequence& u, const SystemSpec& spec, const Observable& f,
                      const BlockStructure& blocks, std::span<const TorusPoint> points) {
  return momo_log_detail(u, spec, f, blocks, points).value;
}

AdversarialResult adversarial_points(const BoundedSequence& u, const SystemSpec& spec,
                                     const Observable& f, const BlockStructure& blocks,
                                     std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("adversarial_points: trials must be positive");
  if (spec.is_wedge()) throw InvalidArgument("adversarial_points: torus systems only");
  systems::check_compatible(spec, f);
  std::vector<TorusPoint> placeholder(blocks.blocks());
  check_blocks(u, blocks, placeholder.size());
  const CounterRng rng(seed);
  const std::size_t d = spec.dimension();
  AdversarialResult r;
  r.points.resize(blocks.blocks());
  parallel_for(blocks.blocks(), [&](std::size_t k) {
    double best = -1.0;
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<double> coords(d);
      for (std::size_t i = 0; i < d; ++i) coords[i] = rng.uniform(k, t * d + i);
      TorusPoint p{std::move(coords)};
      const double v = std::abs(block_sum(u, spec, f, p, blocks.b[k], blocks.gap(k), false));
      if (v > best) {
        best = v;
        r.points[k] = std::move(p);
      }
    }
  });
  r.value = momo_value(u, spec, f, blocks, r.points);
  return r;
}

WedgeMomoResult wedge_momo(const BoundedSequence& u, const SystemSpec& spec,
                           const systems::WedgeObservable& f, const BlockStructure& blocks,
                           std::span<const systems::WedgePoint> points) {
  if (!spec.is_wedge()) throw InvalidArgument("wedge_momo: spec is not a wedge");
  check_blocks(u, blocks, points.size());
  const auto& components = std::get<systems::Wedge>(spec.kind()).components;
  for (std::size_t i = 0; i < f.core.size() && i < components.size(); ++i) {
    systems::check_compatible(components[i], f.core[i]);
  }
  WedgeMomoResult r;
  r.block_sums.resize(blocks.blocks());
  r.in_core.resize(blocks.blocks());
  parallel_for(blocks.blocks(), [&](std::size_t k) {
    r.block_sums[k] = block_sum(u, spec, f, points[k], blocks.b[k], blocks.gap(k), false);
  });
  std::vector<Complex> core, tail;
  for (std::size_t k = 0; k < blocks.blocks(); ++k) {
    const std::size_t c = points[k].component;
    r.in_core[k] = c >= 1 && c <= f.core.size();
    (r.in_core[k] ? core : tail).push_back(r.block_sums[k]);
  }
  const double norm = static_cast<double>(blocks.b.back());
  r.core = sum_abs(core) / norm;
  r.tail = sum_abs(tail) / norm;
  r.value = sum_abs(r.block_sums) / norm;
  return r;
}

}  // namespace orthodyn::momo
