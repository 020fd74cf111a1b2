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

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orthodyn/common.hpp"
#include "orthodyn/sequences.hpp"

namespace orthodyn::systems {

/// Point of T^d; every coordinate lies in [0, 1).
struct TorusPoint {
  std::vector<double> coords;

  std::size_t dimension() const { return coords.size(); }
  bool operator==(const TorusPoint&) const = default;
};

TorusPoint make_point(std::vector<double> coords);  // reduces mod 1

class SystemSpec;

/// x -> x + alpha, coordinatewise.
struct Rotation {
  std::vector<double> alpha;
};
/// (x, y) -> (x, x + y).
struct A2 {};
/// (x, y) -> (x + alpha, x + y).
struct A2Alpha {
  double alpha = 0.0;
};
/// Cartesian product; the point is the concatenation of factor coordinates.
struct Product {
  std::vector<SystemSpec> factors;
};
/// Shrinking wedge of the component systems with scales delta_n (carried,
/// not used geometrically). Component 0 is the fixed wedge point.
struct Wedge {
  std::vector<SystemSpec> components;
  std::vector<double> scales;
};

class SystemSpec {
 public:
  using Kind = std::variant<Rotation, A2, A2Alpha, Product, Wedge>;

  // Validates the system (non-empty rotation/product, wedge scales strictly
  // positive and strictly decreasing, one scale per component).
  explicit SystemSpec(Kind kind);

  const Kind& kind() const { return kind_; }
  // Torus dimension; 0 for a wedge (points are WedgePoint).
  std::size_t dimension() const { return dimension_; }
  bool is_wedge() const { return std::holds_alternative<Wedge>(kind_); }
  // Closed-form n-th iterate exists (everything except wedges).
  bool has_closed_form() const { return !is_wedge(); }
  std::string describe() const;

 private:
  Kind kind_;
  std::size_t dimension_ = 0;
};

SystemSpec rotation(std::vector<double> alpha);
SystemSpec a2();
SystemSpec a2_alpha(double alpha);
SystemSpec product(std::vector<SystemSpec> factors);
SystemSpec wedge(std::vector<SystemSpec> components, std::vector<double> scales);

/// Point of a wedge system: component 0 is the wedge point x0 (no inner
/// point); component n >= 1 carries a point of the n-th component system.
struct WedgePoint {
  std::size_t component = 0;
  std::optional<TorusPoint> inner;

  bool operator==(const WedgePoint&) const = default;
};

WedgePoint wedge_point();  // x0
WedgePoint wedge_point(std::size_t component, TorusPoint inner);

// One application of the map. Throws InvalidArgument on dimension mismatch.
TorusPoint step(const SystemSpec& spec, const TorusPoint& p);
WedgePoint step(const SystemSpec& spec, const WedgePoint& p);

// Inverse map (torus systems only).
TorusPoint step_inverse(const SystemSpec& spec, const TorusPoint& p);

// T^n p through the closed-form iterate.
TorusPoint iterate(const SystemSpec& spec, const TorusPoint& p, std::uint64_t n);
// T^n p by applying step n times.
TorusPoint iterate_by_stepping(const SystemSpec& spec, TorusPoint p, std::uint64_t n);
WedgePoint iterate(const SystemSpec& spec, const WedgePoint& p, std::uint64_t n);

/// e(sum_j m_j x_j) with integer frequencies.
struct Character {
  std::vector<std::int64_t> freqs;
};
/// A constant function.
struct Constant {
  Complex value{1.0, 0.0};
};
using Observable = std::variant<Character, Constant>;

Complex evaluate(const Observable& f, const TorusPoint& p);
// Throws InvalidArgument if f cannot be evaluated on the system's points.
void check_compatible(const SystemSpec& spec, const Observable& f);

/// Observable on a wedge in the eventually-constant class: component i
/// (1-based) uses core[i-1] when i <= core.size(); every other component and
/// the wedge point take the value at_wedge_point.
struct WedgeObservable {
  Complex at_wedge_point{1.0, 0.0};
  std::vector<Observable> core;
};

Complex evaluate(const WedgeObservable& f, const WedgePoint& p);

enum class OrbitMethod { closed_form, stepping };

// values[n] = f(T^n p0), n = 1..N.
sequences::BoundedSequence orbit_observable(const SystemSpec& spec, const TorusPoint& p0,
                                            const Observable& f, std::size_t n,
                                            OrbitMethod method = OrbitMethod::closed_form);
sequences::BoundedSequence orbit_observable(const SystemSpec& spec, const WedgePoint& p0,
                                            const WedgeObservable& f, std::size_t n);

}  // namespace orthodyn::systems
