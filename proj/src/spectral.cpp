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

#include "orthodyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orthodyn::spectral {

namespace {
void check_length(const AutocorrEstimate& c, std::size_t h) {
  if (h == 0) throw InvalidArgument("averaging length H must be positive");
  if (h > c.h_max()) {
    throw InvalidArgument("H = " + std::to_string(h) + " exceeds the autocorrelation range " +
                          std::to_string(c.h_max()));
  }
}
}  // namespace

AutocorrEstimate autocorr(const BoundedSequence& u, std::size_t n, std::size_t h_max,
                          const ghk::Options& opts) {
  if (n == 0) throw InvalidArgument("autocorr: N must be positive");
  if (h_max > n / 4) throw InvalidArgument("autocorr: H_max must be at most N/4");
  return {ghk::correlations(u, h_max, n, opts), n};
}

AtomMass atom_mass_detail(const AutocorrEstimate& c, double theta, std::size_t h) {
  check_length(c, h);
  const Complex raw = ghk::modulated_mean(c.c, theta, h);
  return {std::max(raw.real(), 0.0), raw};
}

double atom_mass(const AutocorrEstimate& c, double theta, std::size_t h) {
  return atom_mass_detail(c, theta, h).mass;
}

double wiener_sum(const AutocorrEstimate& c, std::size_t h) {
  check_length(c, h);
  std::vector<double> terms(h);
  for (std::size_t k = 1; k <= h; ++k) terms[k - 1] = std::norm(c.c[k]);
  return pairwise_sum(terms) / static_cast<double>(h);
}

std::vector<Atom> atom_scan(const AutocorrEstimate& c, std::size_t grid_size, std::size_t h,
                            double tau) {
  if (grid_size < 8) throw InvalidArgument("atom_scan: grid size must be at least 8");
  check_length(c, h);
  const double g = static_cast<double>(grid_size);
  std::vector<double> re(grid_size);
  parallel_for(grid_size, [&](std::size_t j) {
    re[j] = ghk::modulated_mean(c.c, static_cast<double>(j) / g, h).real();
  });
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double left = re[(j + grid_size - 1) % grid_size];
    const double right = re[(j + 1) % grid_size];
    if (re[j] <= tau || re[j] <= left || re[j] < right) continue;
    const double denom = left - 2.0 * re[j] + right;
    const double offset = denom < 0.0 ? std::clamp(0.5 * (left - right) / denom, -0.5, 0.5) : 0.0;
    double theta = (static_cast<double>(j) + offset) / g;
    AtomMass m = atom_mass_detail(c, theta, h);
    if (m.raw.real() < re[j]) {
      theta = static_cast<double>(j) / g;
      m = atom_mass_detail(c, theta, h);
    }
    if (m.mass <= tau) continue;
    theta = frac(theta);
    atoms.push_back({theta, unit(theta), m.mass, m.raw.imag()});
  }
  // A stronger atom of mass M leaks at most M |K_H(d)| <= M / (2 H |d|) into
  // a point at cyclic distance d; peaks under that envelope are sidelobes.
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return a.mass != b.mass ? a.mass > b.mass : a.theta < b.theta;
  });
  std::vector<Atom> kept;
  for (const auto& a : atoms) {
    double leak = 0.0;
    for (const auto& k : kept) {
      const double d = std::fabs(a.theta - k.theta);
      const double dist = std::min(d, 1.0 - d);
      leak += k.mass * std::min(1.0, 1.0 / (2.0 * static_cast<double>(h) * dist));
    }
    if (a.mass > leak) kept.push_back(a);
  }
  std::sort(kept.begin(), kept.end(), [](const Atom& a, const Atom& b) { return a.theta < b.theta; });
  return kept;
}

}  // namespace orthodyn::spectral
