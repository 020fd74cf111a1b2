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

#include <span>

#include "orthodyn/common.hpp"
#include "orthodyn/sequences.hpp"

namespace orthodyn::fourier {

using sequences::BoundedSequence;

/// sup over alpha of |(1/H) sum_{h<H} u(m+1+h) e(h alpha)| for one window.
///
/// The window is zero-padded to grid_factor * H points and transformed; every
/// grid peak that could hide the true maximum (within the relative slack
/// pi^2 / (2 g^2) of the grid maximum) is refined by parabolic interpolation
/// on the log-magnitude and polished with Newton steps on |S|^2 using exact
/// re-evaluations. sup_value is never below the grid maximum.
struct WindowSupResult {
  std::size_t m = 0;  // 0-based offset: the window is u(m+1), ..., u(m+H)
  std::size_t H = 0;
  double sup_value = 0.0;
  double argmax_alpha = 0.0;  // in [0, 1)
  unsigned grid_factor = 0;
  double grid_max = 0.0;
  // Relative error bound of the grid maximum, pi^2 / (2 g^2).
  double relative_slack = 0.0;
};

inline constexpr unsigned kDefaultGridFactor = 8;

double grid_slack(unsigned grid_factor);

// (1/H) sum_{h<H} w[h] e(h alpha), evaluated directly.
Complex window_sum(std::span<const Complex> window, double alpha);

// Throws InvalidArgument for H = 0, g < 2, or a window past the prefix.
WindowSupResult window_sup(const BoundedSequence& u, std::size_t m, std::size_t h,
                           unsigned grid_factor = kDefaultGridFactor);
WindowSupResult window_sup(std::span<const Complex> window, unsigned grid_factor = kDefaultGridFactor);

std::size_t default_stride(std::size_t h);
// Largest M with M * stride + H <= N.
std::size_t max_windows(std::size_t n, std::size_t h, std::size_t stride);

// (1/M) sum over m in {0, stride, ..., (M-1) stride} of window_sup(u, m, H).
double f1(const BoundedSequence& u, std::size_t h, std::size_t windows, std::size_t stride,
          unsigned grid_factor = kDefaultGridFactor);

// Logarithmic outer average over m = 1..M with weights 1/m (normalized by
// sum 1/m).
double f1_log(const BoundedSequence& u, std::size_t h, std::size_t windows,
              unsigned grid_factor = kDefaultGridFactor);

}  // namespace orthodyn::fourier
