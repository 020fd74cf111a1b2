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

#include "orthodyn/dbar.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace orthodyn::dbar {

namespace {

std::size_t power(unsigned a, unsigned k, std::size_t limit) {
  std::size_t r = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (r > limit / a) throw InvalidArgument("A^k exceeds " + std::to_string(limit));
    r *= a;
  }
  return r;
}

constexpr std::size_t kMaxBlocks = std::size_t{1} << 20;

}  // namespace

double shift_residual(unsigned A, unsigned k, std::span<const double> p) {
  if (k <= 1) return 0.0;
  const std::size_t low = p.size() / A;  // number of (k-1)-blocks
  double worst = 0.0;
  for (std::size_t w = 0; w < low; ++w) {
    double left = 0.0, right = 0.0;
    for (unsigned s = 0; s < A; ++s) {
      left += p[w * A + s];
      right += p[s * low + w];
    }
    worst = std::max(worst, std::fabs(left - right));
  }
  return worst;
}

BlockDistribution make_distribution(unsigned A, unsigned k, std::vector<double> p) {
  if (A < 1) throw InvalidArgument("block distribution: alphabet must be nonempty");
  if (k < 1) throw InvalidArgument("block distribution: k must be positive");
  if (p.size() != power(A, k, kMaxBlocks)) throw InvalidArgument("block distribution: need A^k weights");
  for (double v : p) {
    if (!(v >= 0.0)) throw InvalidArgument("block distribution: negative weight");
  }
  const double total = pairwise_sum(p);
  if (std::fabs(total - 1.0) > 1e-12) {
    throw InvalidArgument("block distribution: weights sum to " + std::to_string(total));
  }
  BlockDistribution d{A, k, std::move(p), 0.0};
  d.residual = shift_residual(A, k, d.p);
  return d;
}

BlockDistribution empirical_blocks(std::span<const int> symbols, unsigned A, unsigned k, std::size_t n) {
  if (k < 1 || k > 8) throw InvalidArgument("empirical_blocks: need 1 <= k <= 8");
  if (A < 1) throw InvalidArgument("empirical_blocks: alphabet must be nonempty");
  const std::size_t size = power(A, k, kMaxBlocks);
  if (n > symbols.size()) throw InsufficientData("empirical_blocks: N exceeds the sample length");
  if (n < k) throw InvalidArgument("empirical_blocks: need N >= k");
  for (std::size_t i = 0; i < n; ++i) {
    if (symbols[i] < 0 || static_cast<unsigned>(symbols[i]) >= A) {
      throw InvalidArgument("empirical_blocks: symbol " + std::to_string(symbols[i]) + " at position " +
                            std::to_string(i + 1) + " outside the alphabet");
    }
  }
  std::vector<std::uint64_t> counts(size, 0);
  std::size_t index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    index = (index * A + static_cast<std::size_t>(symbols[i])) % size;
    if (i + 1 >= k) ++counts[index];
  }
  const double windows = static_cast<double>(n - k + 1);
  std::vector<double> p(size);
  for (std::size_t i = 0; i < size; ++i) p[i] = static_cast<double>(counts[i]) / windows;
  // integer counts divide exactly up to rounding; renormalize the residue
  const double total = pairwise_sum(p);
  for (auto& v : p) v /= total;
  return make_distribution(A, k, std::move(p));
}

BlockDistribution bernoulli_blocks(double p, unsigned k) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("bernoulli_blocks: p must lie in [0, 1]");
  const std::size_t size = power(2, k, kMaxBlocks);
  std::vector<double> w(size);
  for (std::size_t i = 0; i < size; ++i) {
    const int ones = __builtin_popcountll(i);
    w[i] = std::pow(p, ones) * std::pow(1.0 - p, static_cast<int>(k) - ones);
  }
  const double total = pairwise_sum(w);
  if (std::fabs(total - 1.0) > 1e-12) throw Error("bernoulli_blocks: weights do not sum to 1");
  return make_distribution(2, k, std::move(w));
}

std::string block_label(std::size_t index, unsigned A, unsigned k) {
  if (A > 36) throw InvalidArgument("block labels need A <= 36");
  static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s(k, '0');
  for (unsigned t = k; t-- > 0;) {
    s[t] = digits[index % A];
    index /= A;
  }
  return s;
}

std::size_t block_index(const std::string& label, unsigned A) {
  std::size_t index = 0;
  for (char ch : label) {
    unsigned d;
    if (ch >= '0' && ch <= '9') {
      d = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'a' && ch <= 'z') {
      d = static_cast<unsigned>(ch - 'a') + 10;
    } else {
      throw InvalidArgument("block label '" + label + "' has a bad digit");
    }
    if (d >= A) throw InvalidArgument("block label '" + label + "' has a digit outside the alphabet");
    index = index * A + d;
  }
  return index;
}

void write_csv(const BlockDistribution& d, std::ostream& os) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "block,prob\n";
  for (std::size_t i = 0; i < d.size(); ++i) out << block_label(i, d.A, d.k) << ',' << d.p[i] << '\n';
  os << out.str();
}

BlockDistribution read_csv(std::istream& is, unsigned A) {
  std::string line;
  if (!std::getline(is, line) || line != "block,prob") throw InvalidArgument("read_csv: expected header block,prob");
  std::vector<std::pair<std::string, double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("read_csv: malformed row '" + line + "'");
    std::istringstream value(line.substr(comma + 1));
    value.imbue(std::locale::classic());
    double v;
    if (!(value >> v)) throw InvalidArgument("read_csv: bad probability in '" + line + "'");
    rows.emplace_back(line.substr(0, comma), v);
  }
  if (rows.empty()) throw InvalidArgument("read_csv: no rows");
  const unsigned k = static_cast<unsigned>(rows.front().first.size());
  std::vector<double> p(power(A, k, kMaxBlocks), 0.0);
  for (const auto& [label, v] : rows) {
    if (label.size() != k) throw InvalidArgument("read_csv: blocks of different lengths");
    p[block_index(label, A)] += v;
  }
  return make_distribution(A, k, std::move(p));
}

double marginal_error(const TransportPlan& plan, std::span<const double> p, std::span<const double> q) {
  std::vector<double> rows(p.size(), 0.0), cols(q.size(), 0.0);
  for (const auto& e : plan.entries) {
    rows.at(e.from) += e.mass;
    cols.at(e.to) += e.mass;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::fabs(rows[i] - p[i]));
  for (std::size_t j = 0; j < q.size(); ++j) worst = std::max(worst, std::fabs(cols[j] - q[j]));
  return worst;
}

namespace {

void check_problem(std::span<const double> a, std::span<const double> b, std::span<const double> cost) {
  if (a.empty() || b.empty()) throw InvalidArgument("transport: empty marginal");
  if (cost.size() != a.size() * b.size()) throw InvalidArgument("transport: cost matrix has the wrong size");
  for (double v : a) {
    if (!(v >= 0.0)) throw InvalidArgument("transport: negative row mass");
  }
  for (double v : b) {
    if (!(v >= 0.0)) throw InvalidArgument("transport: negative column mass");
  }
  const double sa = pairwise_sum(a), sb = pairwise_sum(b);
  if (!(sa > 0.0) || std::fabs(sa - sb) > 1e-9 * std::max(1.0, sa)) {
    throw InvalidArgument("transport: marginals must have equal positive mass");
  }
}

std::vector<std::size_t> support(std::span<const double> w) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) s.push_back(i);
  }
  return s;
}

struct Cell {
  std::size_t r, c;
  double x;
};

}  // namespace

TransportPlan solve_exact(std::span<const double> a_full, std::span<const double> b_full,
                          std::span<const double> cost_full) {
  check_problem(a_full, b_full, cost_full);
  const auto rows = support(a_full), cols = support(b_full);
  const std::size_t m = rows.size(), n = cols.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = cost_full[rows[i] * b_full.size() + cols[j]];
  }
  const double max_cost = *std::max_element(cost.begin(), cost.end());
  const double tol = 1e-12 * (1.0 + std::fabs(max_cost));

  // northwest corner basis: m + n - 1 cells forming a spanning tree
  std::vector<Cell> basis;
  std::vector<std::ptrdiff_t> where(m * n, -1);
  {
    std::vector<double> ra(m), rb(n);
    for (std::size_t i = 0; i < m; ++i) ra[i] = a_full[rows[i]];
    for (std::size_t j = 0; j < n; ++j) rb[j] = b_full[cols[j]];
    std::size_t i = 0, j = 0;
    while (true) {
      double x = std::min(ra[i], rb[j]);
      if (i == m - 1 && j == n - 1) x = std::max(ra[i], rb[j]);
      where[i * n + j] = static_cast<std::ptrdiff_t>(basis.size());
      basis.push_back({i, j, x});
      ra[i] -= x;
      rb[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const std::size_t nodes = m + n;
  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<double> pot(nodes);
  std::vector<std::ptrdiff_t> parent_edge(nodes);
  std::vector<std::size_t> queue;
  queue.reserve(nodes);
  auto other = [&](std::size_t e, std::size_t node) {
    return node < m ? m + basis[e].c : basis[e].r;
  };
  auto rebuild = [&] {
    for (auto& list : adj) list.clear();
    for (std::size_t e = 0; e < basis.size(); ++e) {
      adj[basis[e].r].push_back(e);
      adj[m + basis[e].c].push_back(e);
    }
  };
  // BFS over the tree from root; fills parent_edge and, if potentials is set,
  // the dual potentials with u[root] = 0.
  auto traverse = [&](std::size_t root, bool potentials) {
    std::fill(parent_edge.begin(), parent_edge.end(), -2);
    parent_edge[root] = -1;
    if (potentials) pot[root] = 0.0;
    queue.clear();
    queue.push_back(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (const std::size_t e : adj[node]) {
        const std::size_t next = other(e, node);
        if (parent_edge[next] != -2) continue;
        parent_edge[next] = static_cast<std::ptrdiff_t>(e);
        if (potentials) pot[next] = cost[basis[e].r * n + basis[e].c] - pot[node];
        queue.push_back(next);
      }
    }
  };

  TransportPlan plan;
  plan.solver = Solver::exact;
  const std::size_t cap = 100 * (m * n + 10) * (m + n);
  std::vector<std::size_t> path;
  while (true) {
    rebuild();
    traverse(0, true);
    std::size_t enter = m * n;
    for (std::size_t idx = 0; idx < m * n && enter == m * n; ++idx) {
      if (where[idx] >= 0) continue;
      const std::size_t i = idx / n, j = idx % n;
      if (cost[idx] - pot[i] - pot[m + j] < -tol) enter = idx;
    }
    if (enter == m * n) break;
    if (++plan.iterations > cap) throw NonConvergence("solve_exact: pivot cap reached");
    const std::size_t er = enter / n, ec = enter % n;
    // cycle: entering cell, then the tree path from column ec back to row er
    traverse(er, false);
    path.clear();
    for (std::size_t node = m + ec; node != er;) {
      const auto e = static_cast<std::size_t>(parent_edge[node]);
      path.push_back(e);
      node = other(e, node);
    }
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < path.size(); t += 2) theta = std::min(theta, basis[path[t]].x);
    std::size_t leave = basis.size();
    std::size_t leave_index = m * n;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const auto& cell = basis[path[t]];
      const std::size_t idx = cell.r * n + cell.c;
      if (cell.x == theta && idx < leave_index) {
        leave = path[t];
        leave_index = idx;
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) basis[path[t]].x += (t % 2 == 0 ? -theta : theta);
    where[leave_index] = -1;
    basis[leave] = {er, ec, theta};
    where[enter] = static_cast<std::ptrdiff_t>(leave);
  }

  std::vector<double> terms;
  for (const auto& cell : basis) {
    if (cell.x <= 0.0) continue;
    plan.entries.push_back({rows[cell.r], cols[cell.c], cell.x});
    terms.push_back(cell.x * cost[cell.r * n + cell.c]);
  }
  std::sort(plan.entries.begin(), plan.entries.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  plan.cost = pairwise_sum(terms);
  return plan;
}

TransportPlan solve_entropic(std::span<const double> a_full, std::span<const double> b_full,
                             std::span<const double> cost_full, const Options& opts) {
  check_problem(a_full, b_full, cost_full);
  if (!(opts.epsilon_start > 0.0) || !(opts.epsilon_end > 0.0) || opts.epsilon_stages == 0) {
    throw InvalidArgument("solve_entropic: bad epsilon schedule");
  }
  if (opts.max_iterations == 0) throw InvalidArgument("solve_entropic: iteration cap must be positive");
  const auto rows = support(a_full), cols = support(b_full);
  const std::size_t m = rows.size(), n = cols.size();
  if (m * n > (std::size_t{1} << 24)) throw InvalidArgument("solve_entropic: support too large for a dense plan");
  std::vector<double> cost(m * n), a(m), b(n), la(m), lb(n);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = a_full[rows[i]];
    la[i] = std::log(a[i]);
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = cost_full[rows[i] * b_full.size() + cols[j]];
  }
  for (std::size_t j = 0; j < n; ++j) {
    b[j] = b_full[cols[j]];
    lb[j] = std::log(b[j]);
  }

  std::vector<double> f(m, 0.0), g(n, 0.0), scratch(std::max(m, n));
  auto lse = [&](std::size_t len) {
    const double top = *std::max_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(len));
    double s = 0.0;
    for (std::size_t t = 0; t < len; ++t) s += std::exp(scratch[t] - top);
    return top + std::log(s);
  };
  auto row_error = [&](double eps) {
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < n; ++j) r += std::exp((f[i] + g[j] - cost[i * n + j]) / eps);
      err += std::fabs(r - a[i]);
    }
    return err;
  };

  TransportPlan plan;
  plan.solver = Solver::entropic;
  bool converged = false;
  double eps = opts.epsilon_start;
  for (std::size_t stage = 0; stage < opts.epsilon_stages; ++stage) {
    eps = opts.epsilon_stages == 1
              ? opts.epsilon_end
              : opts.epsilon_start * std::pow(opts.epsilon_end / opts.epsilon_start,
                                              static_cast<double>(stage) / static_cast<double>(opts.epsilon_stages - 1));
    converged = false;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
      ++plan.iterations;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) scratch[j] = (g[j] - cost[i * n + j]) / eps;
        f[i] = eps * (la[i] - lse(n));
      }
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) scratch[i] = (f[i] - cost[i * n + j]) / eps;
        g[j] = eps * (lb[j] - lse(m));
      }
      if ((it % 10 == 0 || it == opts.max_iterations) && row_error(eps) <= 1e-9) {
        converged = true;
        break;
      }
    }
  }
  plan.epsilon = eps;
  plan.converged = converged;
  if (!converged && opts.strict) {
    throw NonConvergence("solve_entropic: no convergence within " + std::to_string(opts.max_iterations) +
                         " iterations at epsilon " + std::to_string(eps));
  }

  // round onto the transport polytope
  std::vector<double> x(m * n), rs(m, 0.0), cs(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      x[i * n + j] = std::exp((f[i] + g[j] - cost[i * n + j]) / eps);
      rs[i] += x[i * n + j];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double s = rs[i] > 0.0 ? std::min(1.0, a[i] / rs[i]) : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[i * n + j] *= s;
      cs[j] += x[i * n + j];
    }
  }
  std::fill(rs.begin(), rs.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = cs[j] > 0.0 ? std::min(1.0, b[j] / cs[j]) : 0.0;
    for (std::size_t i = 0; i < m; ++i) x[i * n + j] *= s;
  }
  std::fill(cs.begin(), cs.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rs[i] += x[i * n + j];
      cs[j] += x[i * n + j];
    }
  }
  double deficit = 0.0;
  for (std::size_t i = 0; i < m; ++i) deficit += std::max(0.0, a[i] - rs[i]);
  std::vector<double> terms;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = x[i * n + j];
      if (deficit > 0.0) v += std::max(0.0, a[i] - rs[i]) * std::max(0.0, b[j] - cs[j]) / deficit;
      if (v <= 0.0) continue;
      plan.entries.push_back({rows[i], cols[j], v});
      terms.push_back(v * cost[i * n + j]);
    }
  }
  plan.cost = pairwise_sum(terms);
  return plan;
}

DbarResult dbar_k(const BlockDistribution& P, const BlockDistribution& Q, const Options& opts) {
  if (P.A != Q.A || P.k != Q.k || P.size() != Q.size()) {
    throw InvalidArgument("dbar_k: distributions must share alphabet and block length");
  }
  const unsigned A = P.A, k = P.k;
  std::vector<double> metric = opts.symbol_metric;
  if (metric.empty()) {
    metric.assign(A * A, 1.0);
    for (unsigned s = 0; s < A; ++s) metric[s * A + s] = 0.0;
  }
  if (metric.size() != std::size_t{A} * A) throw InvalidArgument("dbar_k: symbol metric must be A x A");
  for (double v : metric) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("dbar_k: symbol metric values must lie in [0, 1]");
  }

  const auto rows = support(P.p), cols = support(Q.p);
  auto digits = [&](std::size_t index) {
    std::vector<unsigned> d(k);
    for (unsigned t = k; t-- > 0;) {
      d[t] = static_cast<unsigned>(index % A);
      index /= A;
    }
    return d;
  };
  std::vector<std::vector<unsigned>> rd, cd;
  for (auto i : rows) rd.push_back(digits(i));
  for (auto j : cols) cd.push_back(digits(j));
  std::vector<double> a(rows.size()), b(cols.size()), cost(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) a[i] = P.p[rows[i]];
  for (std::size_t j = 0; j < cols.size(); ++j) b[j] = Q.p[cols[j]];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double s = 0.0;
      for (unsigned t = 0; t < k; ++t) s += metric[rd[i][t] * A + cd[j][t]];
      cost[i * cols.size() + j] = s / k;
    }
  }
  Solver solver = opts.solver;
  if (solver == Solver::automatic) solver = P.size() <= kExactLimit ? Solver::exact : Solver::entropic;
  DbarResult r;
  r.plan = solver == Solver::exact ? solve_exact(a, b, cost) : solve_entropic(a, b, cost, opts);
  for (auto& e : r.plan.entries) {
    e.from = rows[e.from];
    e.to = cols[e.to];
  }
  r.value = std::clamp(r.plan.cost, 0.0, 1.0);
  return r;
}

std::vector<CurvePoint> dbar_curve(std::span<const int> u, std::span<const int> v, unsigned A,
                                   unsigned k_max, std::size_t n, const Options& opts) {
  if (k_max == 0) throw InvalidArgument("dbar_curve: k_max must be positive");
  if (k_max > 8) throw InvalidArgument("dbar_curve: k_max must be at most 8");
  power(A, k_max, kMaxBlocks);
  std::vector<CurvePoint> out(k_max);
  parallel_for(k_max, [&](std::size_t i) {
    const unsigned k = static_cast<unsigned>(i + 1);
    out[i] = {k, dbar_k(empirical_blocks(u, A, k, n), empirical_blocks(v, A, k, n), opts).value};
  });
  return out;
}

LscReport lsc_probe(std::span<const BlockDistribution> family, const BlockDistribution& limit,
                    const BlockDistribution& other, const Options& opts) {
  if (family.empty()) throw InvalidArgument("lsc_probe: empty family");
  LscReport r;
  r.values.resize(family.size());
  parallel_for(family.size(), [&](std::size_t t) { r.values[t] = dbar_k(family[t], other, opts).value; });
  r.limit_value = dbar_k(limit, other, opts).value;
  r.tail_inf = *std::min_element(r.values.begin() + static_cast<std::ptrdiff_t>(family.size() / 2), r.values.end());
  for (double v : r.values) r.deviations.push_back(std::fabs(v - r.limit_value));
  r.ok = r.limit_value <= r.tail_inf + 1e-6;
  return r;
}

}  // namespace orthodyn::dbar
