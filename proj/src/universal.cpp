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
#include "orthodyn/universal.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace orthodyn::universal {

namespace {

void check_point(const TorusPoint& p, std::size_t d, const char* what) {
  if (p.dimension() != d) throw InvalidArgument(std::string("universal: dimension mismatch in ") + what);
  for (double c : p.coords) {
    if (!(c >= 0.0 && c < 1.0)) throw InvalidArgument(std::string("universal: coordinate outside [0,1) in ") + what);
  }
}

void check_dimension(std::size_t d) {
  if (d == 0 || d > kMaxDimension) throw InvalidArgument("universal: dimension must be in [1, 64]");
}

long double reduce(long double x) { return x - std::floor(x); }

Complex unit_long(long double phase) { return unit(static_cast<double>(reduce(phase))); }

// m.x mod 1 in long double.
long double dot_phase(std::span<const std::int64_t> m, const std::vector<double>& x) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] != 0) acc += static_cast<long double>(m[j]) * static_cast<long double>(x[j]);
  }
  return reduce(acc);
}

// m.(n x) mod 1 with each n x_j reduced exactly first.
long double dot_phase_times(std::span<const std::int64_t> m, const std::vector<double>& x, std::uint64_t n) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] != 0) acc += static_cast<long double>(m[j]) * frac_mul_long(x[j], n);
  }
  return reduce(acc);
}

void check_character(const CharacterTriple& f, std::size_t d) {
  if (f.dimension() != d) throw InvalidArgument("universal: character dimension mismatch");
}

double draw_law(const CoordinateLaw& law, const CounterRng& rng, std::uint64_t stream, std::uint64_t counter) {
  if (const auto* p = std::get_if<PointLaw>(&law)) return p->value;
  return rng.uniform(stream, counter);
}

// E e(n m3.y) under eta for the laws with a closed form.
Complex analytic_coefficient(const CharacterTriple& f, const EtaSampler& eta, std::uint64_t n) {
  if (const auto* pm = std::get_if<PointMass>(&eta.kind)) {
    return unit_long(dot_phase_times(f.m3, pm->y0.coords, n));
  }
  const auto& pl = std::get<ProductLaw>(eta.kind);
  long double phase = 0.0L;
  for (std::size_t j = 0; j < eta.d; ++j) {
    if (f.m3[j] == 0 || n == 0) continue;
    if (std::holds_alternative<UniformLaw>(pl.y[j])) return Complex{0.0, 0.0};
    phase += static_cast<long double>(f.m3[j]) * frac_mul_long(std::get<PointLaw>(pl.y[j]).value, n);
  }
  return unit_long(phase);
}

}  // namespace

UniversalState make_state(TorusPoint y, TorusPoint v, TorusPoint z) {
  const std::size_t d = y.dimension();
  check_dimension(d);
  check_point(y, d, "y");
  check_point(v, d, "v");
  check_point(z, d, "z");
  return UniversalState{std::move(y), std::move(v), std::move(z)};
}

CharacterTriple make_character(std::vector<std::int64_t> m1, std::vector<std::int64_t> m2,
                               std::vector<std::int64_t> m3) {
  if (m1.size() != m2.size() || m1.size() != m3.size()) {
    throw InvalidArgument("universal: character vectors of unequal length");
  }
  check_dimension(m1.size());
  for (const auto* m : {&m1, &m2, &m3}) {
    for (std::int64_t e : *m) {
      if (std::llabs(e) > kMaxFrequency) throw InvalidArgument("universal: frequency above 1000");
    }
  }
  return CharacterTriple{std::move(m1), std::move(m2), std::move(m3)};
}

UniversalState apply_A(const UniversalState& s) {
  UniversalState out = s;
  for (std::size_t j = 0; j < s.dimension(); ++j) out.z.coords[j] = frac(s.z.coords[j] + s.y.coords[j]);
  return out;
}

UniversalState apply_A_power(const UniversalState& s, std::uint64_t n) {
  UniversalState out = s;
  for (std::size_t j = 0; j < s.dimension(); ++j) {
    out.z.coords[j] = frac(s.z.coords[j] + frac_mul(s.y.coords[j], n));
  }
  return out;
}

Complex evaluate(const CharacterTriple& f, const UniversalState& s) {
  check_character(f, s.dimension());
  return unit_long(dot_phase(f.m1, s.y.coords) + dot_phase(f.m2, s.v.coords) + dot_phase(f.m3, s.z.coords));
}

Complex evaluate_after(const CharacterTriple& f, const UniversalState& s, std::uint64_t n) {
  check_character(f, s.dimension());
  return unit_long(dot_phase(f.m1, s.y.coords) + dot_phase(f.m2, s.v.coords) + dot_phase(f.m3, s.z.coords) +
                   dot_phase_times(f.m3, s.y.coords, n));
}

Complex chi3(const CharacterTriple& f, const TorusPoint& y) {
  check_character(f, y.dimension());
  return unit_long(dot_phase(f.m3, y.coords));
}

EtaSampler point_mass(TorusPoint y0, TorusPoint v0, std::uint64_t seed) {
  const std::size_t d = y0.dimension();
  check_dimension(d);
  check_point(y0, d, "eta point mass");
  check_point(v0, d, "eta point mass");
  return EtaSampler{PointMass{std::move(y0), std::move(v0)}, d, seed};
}

EtaSampler product_law(std::vector<CoordinateLaw> y, std::vector<CoordinateLaw> v, std::uint64_t seed) {
  const std::size_t d = y.size();
  check_dimension(d);
  if (v.size() != d) throw InvalidArgument("universal: product law dimension mismatch");
  for (const auto* laws : {&y, &v}) {
    for (const auto& law : *laws) {
      if (const auto* p = std::get_if<PointLaw>(&law); p && !(p->value >= 0.0 && p->value < 1.0)) {
        throw InvalidArgument("universal: product law point outside [0,1)");
      }
    }
  }
  return EtaSampler{ProductLaw{std::move(y), std::move(v)}, d, seed};
}

EtaSampler empirical(std::vector<TorusPoint> ys, std::vector<TorusPoint> vs, std::uint64_t seed) {
  if (ys.empty() || ys.size() != vs.size()) throw InvalidArgument("universal: empirical law needs paired samples");
  const std::size_t d = ys.front().dimension();
  check_dimension(d);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    check_point(ys[i], d, "empirical y");
    check_point(vs[i], d, "empirical v");
  }
  return EtaSampler{Empirical{std::move(ys), std::move(vs)}, d, seed};
}

// Counters for sample i: 0..d-1 draw y, d..2d-1 draw v, 2d draws s, 2d+1
// picks the empirical sample.
std::pair<TorusPoint, TorusPoint> eta_sample(const EtaSampler& eta, std::uint64_t index) {
  const CounterRng rng(eta.seed);
  const std::uint64_t d = eta.d;
  if (const auto* pm = std::get_if<PointMass>(&eta.kind)) return {pm->y0, pm->v0};
  if (const auto* pl = std::get_if<ProductLaw>(&eta.kind)) {
    TorusPoint y, v;
    y.coords.resize(d);
    v.coords.resize(d);
    for (std::uint64_t j = 0; j < d; ++j) {
      y.coords[j] = draw_law(pl->y[j], rng, index, j);
      v.coords[j] = draw_law(pl->v[j], rng, index, d + j);
    }
    return {std::move(y), std::move(v)};
  }
  const auto& em = std::get<Empirical>(eta.kind);
  const auto pick = static_cast<std::size_t>(rng.bits(index, 2 * d + 1) % em.ys.size());
  return {em.ys[pick], em.vs[pick]};
}

UniversalState eta_tilde_sample(const EtaSampler& eta, std::uint64_t index, std::uint64_t fiber_steps) {
  if (fiber_steps == 0) throw InvalidArgument("eta_tilde_sample: S must be positive");
  auto [y, v] = eta_sample(eta, index);
  const CounterRng rng(eta.seed);
  const std::uint64_t s = rng.bits(index, 2 * eta.d) % fiber_steps;
  TorusPoint z;
  z.coords.resize(eta.d);
  for (std::size_t j = 0; j < eta.d; ++j) z.coords[j] = frac_mul(y.coords[j], s);
  return UniversalState{std::move(y), std::move(v), std::move(z)};
}

WzorsReport spectral_wzors_check(const CharacterTriple& f, const EtaSampler& eta, std::uint64_t n_max,
                                 std::size_t samples, std::uint64_t fiber_steps) {
  if (samples == 0) throw InvalidArgument("spectral_wzors_check: M must be positive");
  check_character(f, eta.d);
  const std::size_t rows = static_cast<std::size_t>(n_max) + 1;
  const bool sampled_analytic = std::holds_alternative<Empirical>(eta.kind);

  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::vector<Complex>> lhs(chunks), rhs(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<Complex> l(rows), r(sampled_analytic ? rows : 0);
    const std::size_t hi = std::min(samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) {
      const UniversalState w = eta_tilde_sample(eta, i, fiber_steps);
      const Complex f0 = std::conj(evaluate(f, w));
      for (std::size_t n = 0; n < rows; ++n) l[n] += evaluate_after(f, w, n) * f0;
      if (sampled_analytic) {
        for (std::size_t n = 0; n < rows; ++n) r[n] += unit_long(dot_phase_times(f.m3, w.y.coords, n));
      }
    }
    lhs[c] = std::move(l);
    rhs[c] = std::move(r);
  });

  WzorsReport report;
  report.samples = samples;
  report.fiber_steps = fiber_steps;
  report.rows.resize(rows);
  std::vector<Complex> column(chunks);
  for (std::size_t n = 0; n < rows; ++n) {
    auto& row = report.rows[n];
    row.n = n;
    for (std::size_t c = 0; c < chunks; ++c) column[c] = lhs[c][n];
    row.empirical = pairwise_sum(std::span<const Complex>(column)) / static_cast<double>(samples);
    if (sampled_analytic) {
      for (std::size_t c = 0; c < chunks; ++c) column[c] = rhs[c][n];
      row.analytic = pairwise_sum(std::span<const Complex>(column)) / static_cast<double>(samples);
    } else {
      row.analytic = analytic_coefficient(f, eta, n);
    }
    row.discrepancy = std::abs(row.empirical - row.analytic);
    report.max_discrepancy = std::max(report.max_discrepancy, row.discrepancy);
  }
  return report;
}

A2Reduction a2_reduction_identity(std::span<const std::int64_t> alpha, std::span<const std::int64_t> beta,
                                  const momo::BlockStructure& blocks, std::span<const TorusPoint> points,
                                  const sequences::BoundedSequence& u) {
  const std::size_t t = alpha.size();
  if (t == 0 || beta.size() != t) throw InvalidArgument("a2_reduction_identity: alpha and beta must match");
  if (blocks.K() < 2) throw InvalidArgument("a2_reduction_identity: need K >= 2");
  if (points.size() != blocks.blocks()) throw InvalidArgument("a2_reduction_identity: one point per block");
  if (blocks.b.back() - 1 > u.size()) throw InsufficientData("a2_reduction_identity: sequence too short");

  std::vector<systems::SystemSpec> factors(t, systems::a2());
  const auto spec = systems::product(std::move(factors));
  systems::Character chi;
  std::vector<std::int64_t> betas(beta.begin(), beta.end());
  for (std::size_t j = 0; j < t; ++j) {
    chi.freqs.push_back(alpha[j]);
    chi.freqs.push_back(beta[j]);
  }
  const systems::Observable obs = chi;

  A2Reduction out;
  out.lhs.resize(blocks.blocks());
  out.rhs.resize(blocks.blocks());
  parallel_for(blocks.blocks(), [&](std::size_t k) {
    const auto& p0 = points[k];
    if (p0.dimension() != 2 * t) throw InvalidArgument("a2_reduction_identity: point dimension must be 2t");
    std::vector<double> xs(t);
    for (std::size_t j = 0; j < t; ++j) xs[j] = p0.coords[2 * j];
    TorusPoint p = systems::iterate(spec, p0, blocks.b[k]);
    Complex full{0.0, 0.0}, reduced{0.0, 0.0};
    for (std::uint64_t n = blocks.b[k]; n < blocks.b[k + 1]; ++n) {
      full += systems::evaluate(obs, p) * u(n);
      reduced += unit_long(dot_phase_times(betas, xs, n)) * u(n);
      p = systems::step(spec, p);
    }
    out.lhs[k] = std::abs(full);
    out.rhs[k] = std::abs(reduced);
  });
  for (std::size_t k = 0; k < out.lhs.size(); ++k) {
    out.max_residual = std::max(out.max_residual, std::abs(out.lhs[k] - out.rhs[k]));
  }
  return out;
}

}  // namespace orthodyn::universal
