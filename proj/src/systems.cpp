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

#include "orthodyn/systems.hpp"

#include <cmath>
#include <sstream>

namespace orthodyn::systems {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t compute_dimension(const SystemSpec::Kind& kind) {
  return std::visit(
      overloaded{
          [](const Rotation& r) -> std::size_t {
            if (r.alpha.empty()) throw InvalidArgument("rotation needs at least one angle");
            return r.alpha.size();
          },
          [](const A2&) -> std::size_t { return 2; },
          [](const A2Alpha&) -> std::size_t { return 2; },
          [](const Product& p) -> std::size_t {
            if (p.factors.empty()) throw InvalidArgument("product needs at least one factor");
            std::size_t d = 0;
            for (const auto& f : p.factors) {
              if (f.is_wedge()) throw InvalidArgument("product of wedge systems is not supported");
              d += f.dimension();
            }
            return d;
          },
          [](const Wedge& w) -> std::size_t {
            if (w.components.empty()) throw InvalidArgument("wedge needs at least one component");
            if (w.scales.size() != w.components.size()) {
              throw InvalidArgument("wedge needs one scale per component");
            }
            for (std::size_t i = 0; i < w.scales.size(); ++i) {
              if (!(w.scales[i] > 0.0)) throw InvalidArgument("wedge scales must be positive");
              if (i > 0 && !(w.scales[i] < w.scales[i - 1])) {
                throw InvalidArgument("wedge scales must be strictly decreasing");
              }
            }
            for (const auto& c : w.components) {
              if (c.is_wedge()) throw InvalidArgument("nested wedges are not supported");
            }
            return 0;
          },
      },
      kind);
}

void check_point(const SystemSpec& spec, const TorusPoint& p) {
  if (spec.is_wedge()) throw InvalidArgument("torus point given for a wedge system");
  if (p.dimension() != spec.dimension()) {
    throw InvalidArgument("point dimension " + std::to_string(p.dimension()) +
                          " does not match system dimension " + std::to_string(spec.dimension()));
  }
}

void check_wedge_point(const Wedge& w, const WedgePoint& p) {
  if (p.component == 0) {
    if (p.inner) throw InvalidArgument("wedge point x0 carries no inner point");
    return;
  }
  if (p.component > w.components.size()) throw InvalidArgument("wedge component out of range");
  if (!p.inner) throw InvalidArgument("wedge component point needs an inner point");
  check_point(w.components[p.component - 1], *p.inner);
}

// Applies fn(factor, sub-point) to each product factor's slice.
template <typename Fn>
TorusPoint per_factor(const Product& prod, const TorusPoint& p, Fn fn) {
  TorusPoint out;
  out.coords.reserve(p.dimension());
  std::size_t offset = 0;
  for (const auto& f : prod.factors) {
    TorusPoint sub{std::vector<double>(p.coords.begin() + offset,
                                       p.coords.begin() + offset + f.dimension())};
    const TorusPoint r = fn(f, sub);
    out.coords.insert(out.coords.end(), r.coords.begin(), r.coords.end());
    offset += f.dimension();
  }
  return out;
}

}  // namespace

TorusPoint make_point(std::vector<double> coords) {
  for (auto& c : coords) c = frac(c);
  return TorusPoint{std::move(coords)};
}

SystemSpec::SystemSpec(Kind kind) : kind_(std::move(kind)) { dimension_ = compute_dimension(kind_); }

std::string SystemSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Rotation& r) {
                   os << "rotation:";
                   for (std::size_t i = 0; i < r.alpha.size(); ++i) os << (i ? "," : "") << r.alpha[i];
                 },
                 [&](const A2&) { os << "A2"; },
                 [&](const A2Alpha& a) { os << "A2alpha:" << a.alpha; },
                 [&](const Product& p) {
                   os << "product(";
                   for (std::size_t i = 0; i < p.factors.size(); ++i) {
                     os << (i ? ";" : "") << p.factors[i].describe();
                   }
                   os << ")";
                 },
                 [&](const Wedge& w) {
                   os << "wedge(";
                   for (std::size_t i = 0; i < w.components.size(); ++i) {
                     os << (i ? ";" : "") << w.components[i].describe();
                   }
                   os << ")";
                 },
             },
             kind_);
  return os.str();
}

SystemSpec rotation(std::vector<double> alpha) { return SystemSpec(Rotation{std::move(alpha)}); }
SystemSpec a2() { return SystemSpec(A2{}); }
SystemSpec a2_alpha(double alpha) { return SystemSpec(A2Alpha{alpha}); }
SystemSpec product(std::vector<SystemSpec> factors) {
  return SystemSpec(Product{std::move(factors)});
}
SystemSpec wedge(std::vector<SystemSpec> components, std::vector<double> scales) {
  return SystemSpec(Wedge{std::move(components), std::move(scales)});
}

WedgePoint wedge_point() { return WedgePoint{}; }
WedgePoint wedge_point(std::size_t component, TorusPoint inner) {
  if (component == 0) throw InvalidArgument("component 0 is the wedge point");
  return WedgePoint{component, std::move(inner)};
}

TorusPoint step(const SystemSpec& spec, const TorusPoint& p) {
  check_point(spec, p);
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            TorusPoint q = p;
            for (std::size_t j = 0; j < q.coords.size(); ++j) q.coords[j] = frac(q.coords[j] + r.alpha[j]);
            return q;
          },
          [&](const A2&) { return TorusPoint{{p.coords[0], frac(p.coords[0] + p.coords[1])}}; },
          [&](const A2Alpha& a) {
            return TorusPoint{{frac(p.coords[0] + a.alpha), frac(p.coords[0] + p.coords[1])}};
          },
          [&](const Product& prod) {
            return per_factor(prod, p, [](const SystemSpec& f, const TorusPoint& s) { return step(f, s); });
          },
          [&](const Wedge&) -> TorusPoint { throw InvalidArgument("unreachable"); },
      },
      spec.kind());
}

TorusPoint step_inverse(const SystemSpec& spec, const TorusPoint& p) {
  check_point(spec, p);
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            TorusPoint q = p;
            for (std::size_t j = 0; j < q.coords.size(); ++j) q.coords[j] = frac(q.coords[j] - r.alpha[j]);
            return q;
          },
          [&](const A2&) { return TorusPoint{{p.coords[0], frac(p.coords[1] - p.coords[0])}}; },
          [&](const A2Alpha& a) {
            const double x = frac(p.coords[0] - a.alpha);
            return TorusPoint{{x, frac(p.coords[1] - x)}};
          },
          [&](const Product& prod) {
            return per_factor(prod, p, [](const SystemSpec& f, const TorusPoint& s) {
              return step_inverse(f, s);
            });
          },
          [&](const Wedge&) -> TorusPoint { throw InvalidArgument("unreachable"); },
      },
      spec.kind());
}

WedgePoint step(const SystemSpec& spec, const WedgePoint& p) {
  const auto* w = std::get_if<Wedge>(&spec.kind());
  if (!w) throw InvalidArgument("wedge point given for a torus system");
  check_wedge_point(*w, p);
  if (p.component == 0) return p;
  return WedgePoint{p.component, step(w->components[p.component - 1], *p.inner)};
}

TorusPoint iterate(const SystemSpec& spec, const TorusPoint& p, std::uint64_t n) {
  check_point(spec, p);
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            TorusPoint q = p;
            for (std::size_t j = 0; j < q.coords.size(); ++j) {
              q.coords[j] = frac(q.coords[j] + frac_mul(r.alpha[j], n));
            }
            return q;
          },
          [&](const A2&) {
            return TorusPoint{{p.coords[0], frac(p.coords[1] + frac_mul(p.coords[0], n))}};
          },
          [&](const A2Alpha& a) {
            // y_n = y + n x + alpha n(n-1)/2
            const u128 tri = n == 0 ? 0 : static_cast<u128>(n) * (n - 1) / 2;
            const double x = frac(p.coords[0] + frac_mul(a.alpha, n));
            const double y = frac(p.coords[1] + frac_mul(p.coords[0], n) + frac_mul(a.alpha, tri));
            return TorusPoint{{x, y}};
          },
          [&](const Product& prod) {
            return per_factor(prod, p,
                              [n](const SystemSpec& f, const TorusPoint& s) { return iterate(f, s, n); });
          },
          [&](const Wedge&) -> TorusPoint { throw InvalidArgument("unreachable"); },
      },
      spec.kind());
}

TorusPoint iterate_by_stepping(const SystemSpec& spec, TorusPoint p, std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) p = step(spec, p);
  return p;
}

WedgePoint iterate(const SystemSpec& spec, const WedgePoint& p, std::uint64_t n) {
  const auto* w = std::get_if<Wedge>(&spec.kind());
  if (!w) throw InvalidArgument("wedge point given for a torus system");
  check_wedge_point(*w, p);
  if (p.component == 0) return p;
  return WedgePoint{p.component, iterate(w->components[p.component - 1], *p.inner, n)};
}

Complex evaluate(const Observable& f, const TorusPoint& p) {
  return std::visit(overloaded{
                        [&](const Character& c) {
                          if (c.freqs.size() != p.dimension()) {
                            throw InvalidArgument("character length does not match point dimension");
                          }
                          double phase = 0.0;
                          for (std::size_t j = 0; j < c.freqs.size(); ++j) {
                            const std::int64_t m = c.freqs[j];
                            const double t = frac_mul(p.coords[j], static_cast<u128>(m < 0 ? -m : m));
                            phase += m < 0 ? -t : t;
                          }
                          return unit(phase);
                        },
                        [](const Constant& c) {
                          if (!(std::abs(c.value) <= 1.0 + 1e-12)) {
                            throw InvalidArgument("constant observable exceeds unit modulus");
                          }
                          return c.value;
                        },
                    },
                    f);
}

void check_compatible(const SystemSpec& spec, const Observable& f) {
  if (spec.is_wedge()) throw InvalidArgument("wedge systems take a WedgeObservable");
  if (const auto* c = std::get_if<Character>(&f); c && c->freqs.size() != spec.dimension()) {
    throw InvalidArgument("character has " + std::to_string(c->freqs.size()) +
                          " frequencies for a system of dimension " + std::to_string(spec.dimension()));
  }
}

Complex evaluate(const WedgeObservable& f, const WedgePoint& p) {
  if (p.component == 0 || p.component > f.core.size()) return f.at_wedge_point;
  return evaluate(f.core[p.component - 1], *p.inner);
}

sequences::BoundedSequence orbit_observable(const SystemSpec& spec, const TorusPoint& p0,
                                            const Observable& f, std::size_t n,
                                            OrbitMethod method) {
  check_compatible(spec, f);
  check_point(spec, p0);
  std::vector<Complex> values(n);
  if (method == OrbitMethod::stepping) {
    TorusPoint p = p0;
    for (std::size_t i = 0; i < n; ++i) {
      p = step(spec, p);
      values[i] = evaluate(f, p);
    }
  } else {
    constexpr std::size_t kChunk = 1 << 16;
    parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t c) {
      const std::size_t hi = std::min(n, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < hi; ++i) values[i] = evaluate(f, iterate(spec, p0, i + 1));
    });
  }
  return sequences::BoundedSequence(std::move(values), "orbit:" + spec.describe());
}

sequences::BoundedSequence orbit_observable(const SystemSpec& spec, const WedgePoint& p0,
                                            const WedgeObservable& f, std::size_t n) {
  const auto* w = std::get_if<Wedge>(&spec.kind());
  if (!w) throw InvalidArgument("wedge observable given for a torus system");
  check_wedge_point(*w, p0);
  for (std::size_t i = 0; i < f.core.size() && i < w->components.size(); ++i) {
    check_compatible(w->components[i], f.core[i]);
  }
  std::vector<Complex> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = evaluate(f, iterate(spec, p0, i + 1));
  return sequences::BoundedSequence(std::move(values), "orbit:" + spec.describe());
}

}  // namespace orthodyn::systems
