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

// Independent reference computations used by the tests. Nothing here calls the
// library routines that the tests check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline int trial_mobius(std::uint64_t n) {
  int sign = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  if (n > 1) sign = -sign;
  return sign;
}

inline int big_omega(std::uint64_t n) {
  int count = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      ++count;
    }
  }
  return count + (n > 1 ? 1 : 0);
}

inline std::complex<double> e(double theta) {
  const double t = 2.0 * M_PI * theta;
  return {std::cos(t), std::sin(t)};
}

}  // namespace oracle

namespace oracle {

// Naive DFT fhat(xi) = (1/N) sum_n f(n) e(-n xi / N).
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& f) {
  const std::size_t n = f.size();
  std::vector<std::complex<double>> out(n), twiddle(n);
  for (std::size_t k = 0; k < n; ++k) twiddle[k] = e(-double(k) / double(n));
  for (std::size_t xi = 0; xi < n; ++xi) {
    std::complex<double> acc = 0;
    for (std::size_t k = 0; k < n; ++k) acc += f[k] * twiddle[(k * xi) % n];
    out[xi] = acc / double(n);
  }
  return out;
}

// sum_xi |fhat(xi)|^4.
inline double fourth_moment(const std::vector<std::complex<double>>& f) {
  double s = 0;
  for (const auto& c : naive_dft(f)) s += std::norm(c) * std::norm(c);
  return s;
}

// Cyclic Gowers U^2 average (1/N^3) sum f(n) conj f(n+h) conj f(n+k) f(n+h+k).
inline double cyclic_u2_fourth(const std::vector<std::complex<double>>& f) {
  const std::size_t n = f.size();
  std::complex<double> acc = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t k = 0; k < n; ++k)
        acc += f[a] * std::conj(f[(a + h) % n]) * std::conj(f[(a + k) % n]) * f[(a + h + k) % n];
  return acc.real() / (double(n) * n * n);
}

}  // namespace oracle

namespace oracle {

// sup over alpha of |(1/H) sum_h w[h] e(h alpha)|: direct evaluation on a grid
// of 32 H points, then golden-section search around the best few grid points.
struct ScanMax {
  double value;
  double alpha;
};

inline std::complex<double> window_sum(const std::vector<std::complex<double>>& w, double alpha) {
  std::complex<double> s = 0;
  for (std::size_t h = 0; h < w.size(); ++h) s += w[h] * e(std::fmod(double(h) * alpha, 1.0));
  return s / double(w.size());
}

inline ScanMax dense_scan_max(const std::vector<std::complex<double>>& w) {
  const std::size_t grid = 32 * w.size();
  std::vector<double> mag(grid);
  for (std::size_t j = 0; j < grid; ++j) mag[j] = std::abs(window_sum(w, double(j) / grid));
  std::vector<std::size_t> order(grid);
  for (std::size_t j = 0; j < grid; ++j) order[j] = j;
  const std::size_t keep = std::min<std::size_t>(grid, 16);
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  ScanMax best{mag[order[0]], double(order[0]) / grid};
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 0; i < keep; ++i) {
    double lo = (double(order[i]) - 1.0) / grid, hi = (double(order[i]) + 1.0) / grid;
    auto f = [&](double a) { return std::abs(window_sum(w, a)); };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        lo = x1, x1 = x2, f1 = f2, x2 = lo + phi * (hi - lo), f2 = f(x2);
      } else {
        hi = x2, x2 = x1, f2 = f1, x1 = hi - phi * (hi - lo), f1 = f(x1);
      }
    }
    const double a = 0.5 * (lo + hi), v = f(a);
    if (v > best.value) best = {v, a - std::floor(a)};
  }
  return best;
}

}  // namespace oracle

namespace oracle {

// Solves the square system M x = r in place (Gaussian elimination, partial
// pivoting); false if singular.
inline bool solve_square(std::vector<std::vector<double>> M, std::vector<double> r, std::vector<double>& x) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::fabs(M[i][c]) > std::fabs(M[piv][c])) piv = i;
    if (std::fabs(M[piv][c]) < 1e-12) return false;
    std::swap(M[piv], M[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = M[i][c] / M[c][c];
      for (std::size_t j = c; j < n; ++j) M[i][j] -= f * M[c][j];
      r[i] -= f * r[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r[i] / M[i][i];
  return true;
}

// Minimum transport cost by enumerating every basic feasible solution:
// all (m + n - 1)-subsets of cells, solved exactly. For m, n <= 4.
inline double transport_by_vertices(const std::vector<double>& a, const std::vector<double>& b,
                                    const std::vector<double>& cost) {
  const std::size_t m = a.size(), n = b.size(), cells = m * n, basis = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(basis);
  for (std::size_t i = 0; i < basis; ++i) pick[i] = i;
  while (true) {
    // equations: all row sums and the first n - 1 column sums
    std::vector<std::vector<double>> M(basis, std::vector<double>(basis, 0.0));
    std::vector<double> r(basis);
    for (std::size_t i = 0; i < m; ++i) r[i] = a[i];
    for (std::size_t j = 0; j + 1 < n; ++j) r[m + j] = b[j];
    for (std::size_t t = 0; t < basis; ++t) {
      const std::size_t i = pick[t] / n, j = pick[t] % n;
      M[i][t] = 1.0;
      if (j + 1 < n) M[m + j][t] = 1.0;
    }
    std::vector<double> x;
    if (solve_square(M, r, x)) {
      bool feasible = true;
      double c = 0;
      for (std::size_t t = 0; t < basis; ++t) {
        if (x[t] < -1e-12) feasible = false;
        c += x[t] * cost[pick[t]];
      }
      if (feasible) best = std::min(best, c);
    }
    std::size_t k = basis;
    while (k > 0 && pick[k - 1] == cells - basis + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t t = k; t < basis; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

// Dense two-phase tableau simplex (Bland's rule) for the transportation LP.
inline double transport_by_dense_simplex(const std::vector<double>& a, const std::vector<double>& b,
                                         const std::vector<double>& cost) {
  const std::size_t m = a.size(), n = b.size(), vars = m * n;
  const std::size_t rows = m + n - 1, cols = vars + rows;  // structural + artificial
  std::vector<std::vector<double>> T(rows, std::vector<double>(cols + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][i * n + j] = 1.0;
    T[i][cols] = a[i];
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) T[m + j][i * n + j] = 1.0;
    T[m + j][cols] = b[j];
  }
  std::vector<std::size_t> basic(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    T[r][vars + r] = 1.0;
    basic[r] = vars + r;
  }
  auto run = [&](const std::vector<double>& c, std::size_t allowed) {
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed && enter == allowed; ++j) {
        double d = c[j];
        for (std::size_t r = 0; r < rows; ++r) d -= c[basic[r]] * T[r][j];
        if (d < -1e-12) enter = j;
      }
      if (enter == allowed) return;
      std::size_t leave = rows;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        if (T[r][enter] <= 1e-12) continue;
        const double q = T[r][cols] / T[r][enter];
        if (q < ratio - 1e-14 || (std::fabs(q - ratio) <= 1e-14 && basic[r] < basic[leave])) {
          ratio = q;
          leave = r;
        }
      }
      const double pv = T[leave][enter];
      for (auto& v : T[leave]) v /= pv;
      for (std::size_t r = 0; r < rows; ++r) {
        if (r == leave || T[r][enter] == 0.0) continue;
        const double f = T[r][enter];
        for (std::size_t j = 0; j <= cols; ++j) T[r][j] -= f * T[leave][j];
      }
      basic[leave] = enter;
    }
  };
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t j = vars; j < cols; ++j) phase1[j] = 1.0;
  run(phase1, cols);
  // drive remaining artificials out where possible
  for (std::size_t r = 0; r < rows; ++r) {
    if (basic[r] < vars) continue;
    for (std::size_t j = 0; j < vars; ++j) {
      if (std::fabs(T[r][j]) > 1e-9) {
        const double pv = T[r][j];
        for (auto& v : T[r]) v /= pv;
        for (std::size_t q = 0; q < rows; ++q) {
          if (q == r) continue;
          const double f = T[q][j];
          for (std::size_t c = 0; c <= cols; ++c) T[q][c] -= f * T[r][c];
        }
        basic[r] = j;
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < vars; ++j) phase2[j] = cost[j];
  run(phase2, vars);
  double total = 0;
  for (std::size_t r = 0; r < rows; ++r)
    if (basic[r] < vars) total += cost[basic[r]] * T[r][cols];
  return total;
}

}  // namespace oracle
