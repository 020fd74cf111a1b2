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

#include "orthodyn/kronecker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace orthodyn::kronecker {

namespace {

constexpr Real kPi = 3.141592653589793238462643383279502884L;

Real frac_l(Real x) { return x - std::floor(x); }

Complex unit_l(Real phase) { return unit(static_cast<double>(frac_l(phase))); }

Real power(unsigned p, unsigned k) {
  Real r = 1;
  for (unsigned i = 0; i < k; ++i) r *= p;
  return r;
}

// offset of x past the start of a, in [0, 1)
Real offset(const Arc& a, Real x) { return frac_l(x - a.start); }

bool arc_inside(const Arc& inner, const Arc& outer, Real margin = 0) {
  if (outer.length >= 1) return true;
  const Real d = offset(outer, inner.start);
  return d >= margin && d + inner.length <= outer.length - margin;
}

void check_prime(unsigned p) {
  if (!is_prime(p)) throw InvalidArgument("p = " + std::to_string(p) + " is not a prime");
}

void check_arc(const Arc& a, const char* what) {
  if (!(a.length > 0) || a.length > 1 || a.start < 0 || a.start >= 1) {
    throw InvalidArgument(std::string(what) + ": arcs need start in [0, 1) and length in (0, 1]");
  }
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

}  // namespace

Real Arc::center() const { return frac_l(start + length / 2); }

std::string ArcSet::word(std::size_t i) const {
  std::string w(level, '0');
  for (std::size_t t = level; t-- > 0; i >>= 1) w[t] = static_cast<char>('0' + (i & 1));
  return w;
}

ArcSet full_circle() { return {0, {Arc{0, 1}}}; }

Real TestFunction::phase(Real x) const {
  Real s = static_cast<Real>(winding) * x;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Real t = 2 * kPi * static_cast<Real>(j + 1) * x;
    s += a[j].value() * std::cos(t) + b[j].value() * std::sin(t);
  }
  return s;
}

Complex TestFunction::operator()(Real x) const { return unit_l(phase(x)); }

double TestFunction::phase_lipschitz() const {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += static_cast<double>(j + 1) * (std::fabs(static_cast<double>(a[j].value())) +
                                       std::fabs(static_cast<double>(b[j].value())));
  }
  return std::fabs(static_cast<double>(winding)) + 2.0 * M_PI * s;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os << "w=" << winding;
  auto put = [&](const Rational& r) {
    const auto g = gcd64(r.num, r.den);
    os << (g ? r.num / g : 0) << '/' << (g ? r.den / g : 1);
  };
  std::size_t d = a.size();
  while (d > 0 && a[d - 1].num == 0 && b[d - 1].num == 0) --d;
  for (std::size_t j = 0; j < d; ++j) {
    os << ";a" << j + 1 << '=';
    put(a[j]);
    os << ",b" << j + 1 << '=';
    put(b[j]);
  }
  return os.str();
}

void TestFunctionEnumerator::fill() {
  pending_.clear();
  cursor_ = 0;
  ++height_;
  const auto h = static_cast<std::int64_t>(height_);
  for (std::int64_t d = 0; d < h; ++d) {
    for (std::int64_t aw = 0; aw + d < h; ++aw) {
      const std::int64_t q = h - d - aw;
      for (const std::int64_t w : aw == 0 ? std::vector<std::int64_t>{0} : std::vector<std::int64_t>{aw, -aw}) {
        // odometer over 2d numerators in [-q, q]
        std::vector<std::int64_t> nums(static_cast<std::size_t>(2 * d), -q);
        while (true) {
          TestFunction f;
          f.winding = w;
          for (std::int64_t j = 0; j < d; ++j) {
            f.a.push_back({nums[static_cast<std::size_t>(j)], q});
            f.b.push_back({nums[static_cast<std::size_t>(d + j)], q});
          }
          const std::string key = f.describe();
          if (seen_.insert(key).second) pending_.push_back(std::move(f));
          std::size_t pos = nums.size();
          while (pos > 0 && nums[pos - 1] == q) nums[--pos] = -q;
          if (pos == 0) break;
          ++nums[pos - 1];
        }
      }
    }
  }
}

TestFunction TestFunctionEnumerator::next() {
  while (cursor_ >= pending_.size()) fill();
  return pending_[cursor_++];
}

std::vector<TestFunction> enumerate_test_functions(std::size_t count) {
  TestFunctionEnumerator e;
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(e.next());
  return out;
}

bool is_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

LiftResult arc_lift(unsigned p, std::span<const Arc> u, std::span<const Arc> v) {
  check_prime(p);
  if (u.size() != v.size()) throw InvalidArgument("arc_lift: need one target arc per source arc");
  for (const auto& a : u) check_arc(a, "arc_lift");
  for (const auto& a : v) check_arc(a, "arc_lift");
  LiftResult r;
  Real shortest = 1;
  for (const auto& a : u) shortest = std::min(shortest, a.length);
  for (r.k = 1; power(p, r.k) * shortest <= 2; ++r.k) {
    if (r.k >= kMaxLiftDegree) throw InvalidArgument("arc_lift: arcs too short for p^k with k <= 64");
  }
  const Real P = power(p, r.k);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const Arc& U = u[j];
    const Arc& V = v[j];
    const Real u_end = U.start + U.length;
    std::array<Arc, 2> pair;
    for (int c = 0; c < 2; ++c) {
      Real lo, hi;
      if (V.length >= 1) {
        const Real i = std::ceil(U.start * P) + c;
        lo = (i + 0.25L) / P;
        hi = (i + 0.75L) / P;
      } else {
        const Real i = std::ceil(U.start * P - V.start) + c;
        lo = (V.start + i) / P;
        hi = (V.start + V.length + i) / P;
      }
      lo = std::max(lo, U.start);
      hi = std::min(hi, u_end);
      const Real delta = 1e-6L * (hi - lo);
      lo += delta;
      hi -= delta;
      if (!(hi > lo)) throw Error("arc_lift: empty sub-arc");
      pair[c] = Arc{frac_l(lo), hi - lo};
      const Real image = frac_l(P * lo - V.start);
      const bool maps_in = V.length >= 1 || (image > 0 && image + P * (hi - lo) < V.length);
      if (!maps_in || !arc_inside(pair[c], U)) throw Error("arc_lift: sub-arc fails its inclusion check");
    }
    if (offset(pair[0], pair[1].start) <= pair[0].length) throw Error("arc_lift: sub-arcs overlap");
    r.pairs.push_back(pair);
  }
  return r;
}

Real target_half_width(double eps) { return std::asin(static_cast<Real>(eps) / 2) / kPi; }

StepResult kronecker_step(unsigned p, const ArcSet& prev, const TestFunction& f, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("kronecker_step: need 0 < eps <= 1/2");
  if (prev.arcs.empty()) throw InvalidArgument("kronecker_step: empty arc set");
  StepResult r;
  const Real half = target_half_width(eps);
  std::vector<Arc> targets;
  for (const auto& a : prev.arcs) {
    const Real x = a.center();
    r.centers.push_back(x);
    targets.push_back(Arc{frac_l(frac_l(f.phase(x)) - half), 2 * half});
  }
  const auto lift = arc_lift(p, prev.arcs, targets);
  r.k = lift.k;
  r.next.level = prev.level + 1;
  const Real level_cap = std::ldexp(Real{1}, -static_cast<int>(r.next.level));
  for (std::size_t i = 0; i < prev.arcs.size(); ++i) {
    const Real cap = std::min(prev.arcs[i].length / 4, level_cap);
    for (const auto& child : lift.pairs[i]) {
      Arc c = child;
      if (c.length > cap) c = Arc{frac_l(c.start + (c.length - cap) / 2), cap};
      r.next.arcs.push_back(c);
    }
  }
  return r;
}

StarResult verify_star(unsigned p, const ArcSet& K, const TestFunction& f, unsigned k, double eps,
                       std::size_t samples_per_arc) {
  check_prime(p);
  if (!(eps > 0.0)) throw InvalidArgument("verify_star: eps must be positive");
  StarResult r;
  r.bound = 2 * eps;
  const Real P = power(p, k);
  const double lipschitz = 2.0 * M_PI * static_cast<double>(P) + 2.0 * M_PI * f.phase_lipschitz();
  const Real steps = static_cast<Real>(samples_per_arc + 1);
  for (const auto& a : K.arcs) {
    for (std::size_t t = 0; t <= samples_per_arc + 1; ++t) {
      const Real x = a.start + a.length * static_cast<Real>(t) / steps;
      r.worst = std::max(r.worst, std::abs(unit_l(P * x) - f(x)));
    }
    r.slack = std::max(r.slack, lipschitz * static_cast<double>(a.length / steps) / 2.0);
  }
  r.ok = r.worst + r.slack < r.bound;
  return r;
}

BuildResult build(unsigned p, std::size_t depth, const BuildOptions& opts) {
  check_prime(p);
  BuildResult r;
  r.levels.push_back(full_circle());
  TestFunctionEnumerator enumerator;
  for (std::size_t n = 1; n <= depth; ++n) {
    const TestFunction f = n <= opts.functions.size() ? opts.functions[n - 1] : enumerator.next();
    const double eps = opts.epsilon ? opts.epsilon(n) : std::ldexp(1.0, -static_cast<int>(n));
    auto step = kronecker_step(p, r.levels.back(), f, eps);
    const auto star = verify_star(p, step.next, f, step.k, eps, opts.samples_per_arc);
    r.certificates.push_back({n, step.k, eps, star.worst, star.slack, star.bound, star.ok, f.describe()});
    r.all_ok = r.all_ok && star.ok;
    r.levels.push_back(std::move(step.next));
  }
  return r;
}

Real min_gap(const ArcSet& K) {
  if (K.arcs.empty()) return 1;
  std::vector<Arc> sorted = K.arcs;
  std::sort(sorted.begin(), sorted.end(), [](const Arc& x, const Arc& y) { return x.start < y.start; });
  Real gap = sorted.front().start + 1 - sorted.back().end();
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) gap = std::min(gap, sorted[i + 1].start - sorted[i].end());
  return gap;
}

bool disjoint(const ArcSet& K, Real margin) { return K.arcs.size() <= 1 || min_gap(K) > margin; }

bool nested(const ArcSet& child, const ArcSet& parent) {
  if (child.level != parent.level + 1 || child.arcs.size() != 2 * parent.arcs.size()) return false;
  for (std::size_t i = 0; i < child.arcs.size(); ++i) {
    if (!arc_inside(child.arcs[i], parent.arcs[i / 2])) return false;
  }
  return true;
}

void write_arcs_csv(std::span<const ArcSet> levels, std::ostream& os) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "level,word,start,length\n";
  for (const auto& K : levels) {
    for (std::size_t i = 0; i < K.arcs.size(); ++i) {
      out << K.level << ',' << K.word(i) << ',' << static_cast<double>(K.arcs[i].start) << ','
          << static_cast<double>(K.arcs[i].length) << '\n';
    }
  }
  os << out.str();
}

}  // namespace orthodyn::kronecker
