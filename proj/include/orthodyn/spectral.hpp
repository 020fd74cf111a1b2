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

#include <vector>

#include "orthodyn/ghk.hpp"

/// Empirical spectral diagnostics built on prefix autocorrelations.
///
/// Frequencies are passed as theta with lambda = e(theta). The modulation
/// convention is the one of ghk::u1_lambda_sq, so atom_mass(autocorr(u), theta,
/// H) reproduces u1_lambda_sq(u, theta, N, H).raw bit for bit and
/// u = e(n alpha) carries its atom at theta = alpha.
namespace orthodyn::spectral {

using sequences::BoundedSequence;

struct AutocorrEstimate {
  std::vector<Complex> c;  // c[h] = corr(u, h, N), h = 0..H_max
  std::size_t N = 0;

  std::size_t h_max() const { return c.empty() ? 0 : c.size() - 1; }
};

// Throws InvalidArgument if H_max > N / 4.
AutocorrEstimate autocorr(const BoundedSequence& u, std::size_t n, std::size_t h_max,
                          const ghk::Options& opts = {});

struct AtomMass {
  double mass = 0.0;  // max(Re, 0)
  Complex raw;        // (1/H) sum_{h=1}^H e(h theta) c[h]; Im is a diagnostic
};

AtomMass atom_mass_detail(const AutocorrEstimate& c, double theta, std::size_t h);
double atom_mass(const AutocorrEstimate& c, double theta, std::size_t h);

// (1/H) sum_{h=1}^H |c[h]|^2.
double wiener_sum(const AutocorrEstimate& c, std::size_t h);

struct Atom {
  double theta = 0.0;  // in [0, 1)
  Complex lambda;      // e(theta)
  double mass = 0.0;
  double imag_residue = 0.0;
};

inline constexpr double kDefaultAtomThreshold = 0.05;

// atom_mass on theta = j / G, j < G; cyclic local maxima above tau, each
// refined by parabolic interpolation and re-evaluated. Sorted by theta. The
// real part of the one-sided kernel oscillates with period 1/H, so G should
// be several times H (G = 8H resolves the main lobes). Peaks explained by the
// kernel leakage of a stronger atom are dropped. Throws for G < 8.
std::vector<Atom> atom_scan(const AutocorrEstimate& c, std::size_t grid_size, std::size_t h,
                            double tau = kDefaultAtomThreshold);

}  // namespace orthodyn::spectral
