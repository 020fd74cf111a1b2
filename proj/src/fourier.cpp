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

#include "orthodyn/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace orthodyn::fourier {

namespace {

// FFTW plans are created under a lock and kept for the process lifetime;
// fftw_execute_dft on a shared plan is thread-safe.
class PlanCache {
 public:
  static fftw_plan backward(std::size_t size) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    auto it = cache.plans_.find(size);
    if (it != cache.plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(size);
    auto* out = fftw_alloc_complex(size);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(size), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    cache.plans_.emplace(size, plan);
    return plan;
  }

 private:
  ~PlanCache() {
    for (auto& [_, plan] : plans_) fftw_destroy_plan(plan);
  }
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

// Reusable per-thread work area for one transform size.
class Scanner {
 public:
  Scanner(std::size_t h, unsigned g)
      : h_(h), g_(g), size_(h * g), plan_(PlanCache::backward(size_)),
        in_(fftw_alloc_complex(size_)), out_(fftw_alloc_complex(size_)), mags_(size_) {}

  WindowSupResult scan(std::span<const Complex> window);

 private:
  std::size_t h_;
  unsigned g_;
  std::size_t size_;
  fftw_plan plan_;
  Buffer in_, out_;
  std::vector<double> mags_;
};

// Value and first two derivatives of |S|^2 at alpha, with phases centered on
// the middle of the window (|S| is unchanged, derivatives stay small).
struct Local {
  double phi, d1, d2;
};

Local evaluate_local(std::span<const Complex> w, double alpha) {
  const double center = 0.5 * static_cast<double>(w.size() - 1);
  Complex s = 0.0, s1 = 0.0, s2 = 0.0;
  const Complex step = unit(alpha);
  Complex z = 1.0;
  for (std::size_t h = 0; h < w.size(); ++h) {
    if (h % 64 == 0) z = unit(frac_mul(alpha, h));
    const double c = static_cast<double>(h) - center;
    const Complex t = w[h] * z;
    s += t;
    s1 += c * t;
    s2 += c * c * t;
    z *= step;
  }
  const double inv = 1.0 / static_cast<double>(w.size());
  s *= inv;
  // d/dalpha brings down 2 pi i c per term
  s1 *= Complex(0.0, kTwoPi) * inv;
  s2 *= -(kTwoPi * kTwoPi) * inv;
  return {std::norm(s), 2.0 * (std::conj(s) * s1).real(),
          2.0 * std::norm(s1) + 2.0 * (std::conj(s) * s2).real()};
}

WindowSupResult Scanner::scan(std::span<const Complex> window) {
  for (std::size_t i = 0; i < size_; ++i) {
    const Complex v = i < h_ ? window[i] : Complex(0.0);
    in_[i][0] = v.real();
    in_[i][1] = v.imag();
  }
  fftw_execute_dft(plan_, in_.get(), out_.get());
  const double inv_h = 1.0 / static_cast<double>(h_);
  std::size_t best = 0;
  for (std::size_t j = 0; j < size_; ++j) {
    mags_[j] = std::hypot(out_[j][0], out_[j][1]) * inv_h;
    if (mags_[j] > mags_[best]) best = j;
  }
  WindowSupResult r;
  r.H = h_;
  r.grid_factor = g_;
  r.relative_slack = grid_slack(g_);
  r.grid_max = mags_[best];
  r.sup_value = mags_[best];
  r.argmax_alpha = static_cast<double>(best) / static_cast<double>(size_);
  if (r.grid_max == 0.0) return r;

  const double floor_value = (1.0 - std::min(1.0, r.relative_slack)) * r.grid_max;
  std::vector<std::size_t> peaks;
  for (std::size_t j = 0; j < size_; ++j) {
    const double left = mags_[(j + size_ - 1) % size_];
    const double right = mags_[(j + 1) % size_];
    if (mags_[j] >= floor_value && mags_[j] >= left && mags_[j] >= right) peaks.push_back(j);
  }
  // Spread spectra (quadratic phases, noise) put many peaks inside the slack;
  // only the highest few are polished.
  constexpr std::size_t kMaxPolished = 8;
  if (peaks.size() > kMaxPolished) {
    std::partial_sort(peaks.begin(), peaks.begin() + kMaxPolished, peaks.end(),
                      [&](std::size_t a, std::size_t b) {
                        return mags_[a] != mags_[b] ? mags_[a] > mags_[b] : a < b;
                      });
    peaks.resize(kMaxPolished);
  }
  const double cell = 1.0 / static_cast<double>(size_);
  for (const std::size_t j : peaks) {
    const double ym = std::log(std::max(mags_[(j + size_ - 1) % size_], 1e-300));
    const double y0 = std::log(std::max(mags_[j], 1e-300));
    const double yp = std::log(std::max(mags_[(j + 1) % size_], 1e-300));
    const double denom = ym - 2.0 * y0 + yp;
    double offset = denom < 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    double alpha = (static_cast<double>(j) + offset) * cell;
    Local at = evaluate_local(window, alpha);
    for (int it = 0; it < 8 && at.d2 < 0.0; ++it) {
      double delta = std::clamp(-at.d1 / at.d2, -cell, cell);
      bool moved = false;
      for (int halve = 0; halve < 6; ++halve, delta *= 0.5) {
        const Local next = evaluate_local(window, alpha + delta);
        if (next.phi >= at.phi) {
          alpha += delta;
          at = next;
          moved = true;
          break;
        }
      }
      if (!moved || std::fabs(delta) < 1e-14) break;
    }
    const double value = std::sqrt(at.phi);
    if (value > r.sup_value) {
      r.sup_value = value;
      r.argmax_alpha = frac(alpha);
    }
  }
  return r;
}

}  // namespace

double grid_slack(unsigned grid_factor) {
  const double g = static_cast<double>(grid_factor);
  return (M_PI * M_PI / 2.0) / (g * g);
}

Complex window_sum(std::span<const Complex> window, double alpha) {
  Complex s = 0.0;
  for (std::size_t h = 0; h < window.size(); ++h) s += window[h] * unit(frac_mul(alpha, h));
  return s / static_cast<double>(window.size());
}

WindowSupResult window_sup(std::span<const Complex> window, unsigned grid_factor) {
  if (window.empty()) throw InvalidArgument("window_sup: H must be positive");
  if (grid_factor < 2) throw InvalidArgument("window_sup: grid factor must be at least 2");
  Scanner scanner(window.size(), grid_factor);
  return scanner.scan(window);
}

WindowSupResult window_sup(const BoundedSequence& u, std::size_t m, std::size_t h,
                           unsigned grid_factor) {
  if (h == 0) throw InvalidArgument("window_sup: H must be positive");
  if (m + h > u.size()) throw InvalidArgument("window_sup: window runs past the prefix");
  auto r = window_sup(u.values().subspan(m, h), grid_factor);
  r.m = m;
  return r;
}

std::size_t default_stride(std::size_t h) { return std::max<std::size_t>(1, h / 4); }

std::size_t max_windows(std::size_t n, std::size_t h, std::size_t stride) {
  if (stride == 0 || n < h) return 0;
  return (n - h) / stride;
}

namespace {

// Applies window_sup over windows starting at offset(i), i < count, and
// returns the per-window values in index order.
template <typename Offset>
std::vector<double> scan_windows(const BoundedSequence& u, std::size_t h, std::size_t count,
                                 unsigned g, Offset offset) {
  std::vector<double> values(count);
  constexpr std::size_t kChunk = 256;
  parallel_for((count + kChunk - 1) / kChunk, [&](std::size_t c) {
    Scanner scanner(h, g);
    const std::size_t hi = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) {
      values[i] = scanner.scan(u.values().subspan(offset(i), h)).sup_value;
    }
  });
  return values;
}

}  // namespace

double f1(const BoundedSequence& u, std::size_t h, std::size_t windows, std::size_t stride,
          unsigned grid_factor) {
  if (h == 0) throw InvalidArgument("f1: H must be positive");
  if (stride == 0) throw InvalidArgument("f1: stride must be at least 1");
  if (windows == 0) throw InvalidArgument("f1: empty window set");
  if (grid_factor < 2) throw InvalidArgument("f1: grid factor must be at least 2");
  if (windows * stride + h > u.size()) {
    throw InvalidArgument("f1: M * stride + H exceeds the prefix length");
  }
  const auto values = scan_windows(u, h, windows, grid_factor, [stride](std::size_t i) { return i * stride; });
  return pairwise_sum(values) / static_cast<double>(windows);
}

double f1_log(const BoundedSequence& u, std::size_t h, std::size_t windows, unsigned grid_factor) {
  if (h == 0) throw InvalidArgument("f1_log: H must be positive");
  if (windows == 0) throw InvalidArgument("f1_log: empty window set");
  if (grid_factor < 2) throw InvalidArgument("f1_log: grid factor must be at least 2");
  if (windows + h > u.size()) throw InvalidArgument("f1_log: M + H exceeds the prefix length");
  auto values = scan_windows(u, h, windows, grid_factor, [](std::size_t i) { return i + 1; });
  std::vector<double> weights(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    weights[i] = 1.0 / static_cast<double>(i + 1);
    values[i] *= weights[i];
  }
  return pairwise_sum(values) / pairwise_sum(weights);
}

}  // namespace orthodyn::fourier
