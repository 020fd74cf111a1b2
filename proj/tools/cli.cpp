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
#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "orthodyn/dbar.hpp"
#include "orthodyn/fourier.hpp"
#include "orthodyn/ghk.hpp"
#include "orthodyn/kronecker.hpp"
#include "orthodyn/momo.hpp"
#include "orthodyn/spectral.hpp"
#include "orthodyn/systems.hpp"
#include "orthodyn/universal.hpp"

namespace orthodyn::cli {

using json = nlohmann::ordered_json;
using sequences::BoundedSequence;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  double x = 0.0;
  is >> x;
  if (!is || !is.eof() || !std::isfinite(x)) throw UsageError(key, "not a number: '" + text + "'");
  return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double x = parse_double(key, text);
  if (x < 0 || x != std::floor(x) || x > 9007199254740992.0) throw UsageError(key, "not a count: '" + text + "'");
  return static_cast<std::uint64_t>(x);
}

std::size_t to_count(const std::string& key, double x, bool positive = true) {
  if (!(x >= 0) || x != std::floor(x) || x > 9007199254740992.0) {
    throw UsageError(key, "expected a non-negative integer, got " + format_number(x));
  }
  if (positive && x == 0) throw UsageError(key, "must be positive");
  return static_cast<std::size_t>(x);
}

std::pair<std::string, std::string> head_tail(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

struct Check {
  std::string name;
  bool pass = false;
  json detail;
};

struct Artifact {
  std::string file;
  std::string contents;
};

struct Outcome {
  std::vector<Artifact> files;
  json results = json::object();
  std::vector<Check> checks;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& c : cells) {
    if (!row.empty()) row += ',';
    row += c;
  }
  return row + '\n';
}

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }

void add_threshold_checks(Outcome& out, const std::string& what, double value, double below, double above) {
  if (!std::isnan(below)) {
    out.checks.push_back({what + "_below", value <= below, {{"value", value}, {"bound", below}}});
  }
  if (!std::isnan(above)) {
    out.checks.push_back({what + "_above", value >= above, {{"value", value}, {"bound", above}}});
  }
}

struct Common {
  std::string out = ".";
  unsigned threads = 0;
  std::string cache;
};

BoundedSequence sequence_for(const Common& common, const std::string& spec, std::size_t n) {
  return load_sequence(spec, n, common.cache);
}

// ---- ghk

struct GhkParams {
  std::string seq = "mobius";
  double N = 1e6;
  double H = 0;
  int s = 1;
  bool log = false;
  double expect_below = kUnset, expect_above = kUnset;
};

Outcome run_ghk(const GhkParams& p, const Common& common) {
  const std::size_t n = to_count("--N", p.N);
  const std::size_t h = p.H == 0 ? ghk::default_h(n) : to_count("--H", p.H);
  if (p.s < 1 || p.s > 3) throw UsageError("--s", "must be 1, 2 or 3");
  if (p.s == 1 && static_cast<double>(h) > 0.1 * static_cast<double>(n)) {
    throw UsageError("--H", "u^1 estimates need H <= N/10");
  }
  const auto u = sequence_for(common, p.seq, n + static_cast<std::size_t>(p.s) * h);

  ghk::GhkEstimate est;
  ghk::Options opts;
  if (p.log) {
    ghk::LogParams lp;
    lp.N = n;
    lp.H = h;
    lp.s = p.s;
    est = ghk::log_variant(p.s == 1 ? ghk::Op::u1 : ghk::Op::us, u, lp);
  } else {
    est = p.s == 1 ? ghk::u1_sq(u, n, h, opts) : ghk::us_norm(u, p.s, n, h, opts);
  }
  Outcome out;
  std::string csv;
  if (p.s == 1) {
    csv = csv_row({"N", "H", "u1_sq_raw", "u1_sq"}) + csv_row({num(std::uint64_t{n}), num(std::uint64_t{h}),
                                                               num(est.raw.real()), num(est.value)});
  } else {
    csv = csv_row({"N", "H", "s", "us_raw", "us"}) +
          csv_row({num(std::uint64_t{n}), num(std::uint64_t{h}), std::to_string(p.s), num(est.raw.real()),
                   num(est.value)});
  }
  out.files.push_back({"ghk.csv", csv});
  out.results = {{"value", est.value}, {"raw_re", est.raw.real()}, {"raw_im", est.raw.imag()}};
  add_threshold_checks(out, "value", est.value, p.expect_below, p.expect_above);
  return out;
}

// ---- fourier

struct FourierParams {
  std::string seq = "mobius";
  double N = 1e6;
  std::vector<double> H{256, 512, 1024, 2048, 4096};
  double stride = 0;
  double windows = 0;
  unsigned grid = fourier::kDefaultGridFactor;
  bool log = false;
  bool expect_decreasing = false;
};

Outcome run_fourier(const FourierParams& p, const Common& common) {
  const std::size_t n = to_count("--N", p.N);
  if (p.H.empty()) throw UsageError("--H", "needs at least one window length");
  if (p.grid < 2) throw UsageError("--grid", "must be at least 2");
  struct Plan {
    std::size_t h, stride, windows;
  };
  std::vector<Plan> plans;
  for (double hv : p.H) {
    const std::size_t h = to_count("--H", hv);
    if (h >= n) throw UsageError("--H", "window length must be below N");
    const std::size_t stride = p.log ? 1 : (p.stride == 0 ? fourier::default_stride(h) : to_count("--stride", p.stride));
    const std::size_t cap = p.log ? n - h : fourier::max_windows(n, h, stride);
    const std::size_t w = p.windows == 0 ? cap : to_count("--windows", p.windows);
    if (w == 0 || w > cap) throw UsageError("--windows", "needs 1 <= windows <= " + std::to_string(cap) + " at H = " + std::to_string(h));
    plans.push_back({h, stride, w});
  }
  const auto u = sequence_for(common, p.seq, n);
  Outcome out;
  std::string csv = csv_row({"H", "windows", "stride", "f1"});
  std::vector<double> values;
  json rows = json::array();
  for (const auto& pl : plans) {
    const double v = p.log ? fourier::f1_log(u, pl.h, pl.windows, p.grid)
                           : fourier::f1(u, pl.h, pl.windows, pl.stride, p.grid);
    values.push_back(v);
    csv += csv_row({num(std::uint64_t{pl.h}), num(std::uint64_t{pl.windows}), num(std::uint64_t{pl.stride}), num(v)});
    rows.push_back({{"H", pl.h}, {"f1", v}});
  }
  out.files.push_back({"fourier.csv", csv});
  out.results = {{"f1", rows}};
  if (p.expect_decreasing) {
    bool dec = true;
    for (std::size_t i = 1; i < values.size(); ++i) dec = dec && values[i] < values[i - 1];
    out.checks.push_back({"f1_strictly_decreasing", dec, {{"values", values}}});
  }
  return out;
}

// ---- spectral

struct SpectralParams {
  std::string seq = "mixed:0.41421356237309503,0.7071067811865476";
  double N = 1e6;
  double H = 1000;
  double grid = 0;
  double tau = spectral::kDefaultAtomThreshold;
  int expect_atoms = -1;
};

Outcome run_spectral(const SpectralParams& p, const Common& common) {
  const std::size_t n = to_count("--N", p.N);
  const std::size_t h = to_count("--H", p.H);
  if (h > n / 4) throw UsageError("--H", "needs H <= N/4");
  const std::size_t g = p.grid == 0 ? 8 * h : to_count("--grid", p.grid);
  if (g < 8) throw UsageError("--grid", "needs at least 8 points");
  if (!(p.tau > 0)) throw UsageError("--tau", "must be positive");
  const auto u = sequence_for(common, p.seq, n + h);
  const auto c = spectral::autocorr(u, n, h);
  const auto atoms = spectral::atom_scan(c, g, h, p.tau);
  const double w = spectral::wiener_sum(c, h);

  Outcome out;
  std::string csv = csv_row({"theta", "lambda_re", "lambda_im", "mass", "imag_residue"});
  double sq = 0.0;
  for (const auto& a : atoms) {
    csv += csv_row({num(a.theta), num(a.lambda.real()), num(a.lambda.imag()), num(a.mass), num(a.imag_residue)});
    sq += a.mass * a.mass;
  }
  out.files.push_back({"spectral.csv", csv});
  out.results = {{"wiener_sum", w}, {"atoms", atoms.size()}, {"sum_mass_sq", sq}, {"grid", g}};
  if (p.expect_atoms >= 0) {
    out.checks.push_back({"atom_count", atoms.size() == static_cast<std::size_t>(p.expect_atoms),
                          {{"found", atoms.size()}, {"expected", p.expect_atoms}}});
  }
  return out;
}

// ---- momo

struct MomoParams {
  std::string seq = "random:7";
  double N = 0;
  std::string system = "rotation:0.41421356237309503";
  std::vector<std::int64_t> freqs{1};
  std::string blocks = "poly:2";
  double K = 100;
  std::string points = "random:1";
  bool log = false;
  double expect_below = kUnset, expect_above = kUnset;
};

systems::SystemSpec parse_system(const std::string& spec) {
  const auto [name, rest] = head_tail(spec);
  if (name == "a2" && rest.empty()) return systems::a2();
  if (name == "a2alpha") return systems::a2_alpha(parse_double("--system", rest));
  if (name == "rotation") {
    std::vector<double> alpha;
    for (const auto& s : split(rest, ',')) alpha.push_back(parse_double("--system", s));
    if (alpha.empty()) throw UsageError("--system", "rotation needs angles");
    return systems::rotation(alpha);
  }
  throw UsageError("--system", "unknown system '" + spec + "'");
}

momo::BlockStructure parse_blocks(const std::string& spec, std::size_t k) {
  const auto [name, rest] = head_tail(spec);
  try {
    if (name == "poly") return momo::make_blocks(momo::Poly{static_cast<unsigned>(parse_count("--blocks", rest))}, k);
    if (name == "geom") return momo::make_blocks(momo::Geometric{parse_double("--blocks", rest)}, k);
  } catch (const InvalidArgument& e) {
    throw UsageError("--blocks", e.what());
  }
  throw UsageError("--blocks", "unknown block rule '" + spec + "'");
}

Outcome run_momo(const MomoParams& p, const Common& common) {
  const auto spec = parse_system(p.system);
  const systems::Observable f = systems::Character{p.freqs};
  try {
    systems::check_compatible(spec, f);
  } catch (const InvalidArgument& e) {
    throw UsageError("--freqs", e.what());
  }
  const auto blocks = parse_blocks(p.blocks, to_count("--K", p.K));
  if (blocks.K() < 2) throw UsageError("--K", "needs K >= 2");
  const std::size_t need = static_cast<std::size_t>(blocks.b.back() - 1);
  const std::size_t n = p.N == 0 ? need : to_count("--N", p.N);
  if (n < need) throw UsageError("--N", "blocks need N >= b_K - 1 = " + std::to_string(need));
  const auto [pname, prest] = head_tail(p.points);
  std::vector<std::string> pargs = split(prest, ':');
  if ((pname == "random" && pargs.size() != 1) || (pname == "adversarial" && pargs.size() != 2) ||
      (pname != "random" && pname != "adversarial")) {
    throw UsageError("--points", "expected random:SEED or adversarial:TRIALS:SEED");
  }
  const auto u = sequence_for(common, p.seq, n);

  std::vector<systems::TorusPoint> pts;
  if (pname == "random") {
    const CounterRng rng(parse_count("--points", pargs[0]));
    for (std::size_t k = 0; k < blocks.blocks(); ++k) {
      std::vector<double> c(spec.dimension());
      for (std::size_t j = 0; j < c.size(); ++j) c[j] = rng.uniform(k, j);
      pts.push_back({c});
    }
  } else {
    pts = momo::adversarial_points(u, spec, f, blocks, parse_count("--points", pargs[0]),
                                   parse_count("--points", pargs[1]))
              .points;
  }
  const auto res = p.log ? momo::momo_log_detail(u, spec, f, blocks, pts) : momo::momo_detail(u, spec, f, blocks, pts);
  Outcome out;
  std::string csv = csv_row({"k", "b_k", "b_next", "re", "im", "abs"});
  for (std::size_t k = 0; k < res.block_sums.size(); ++k) {
    const auto& s = res.block_sums[k];
    csv += csv_row({std::to_string(k + 1), num(blocks.b[k]), num(blocks.b[k + 1]), num(s.real()), num(s.imag()),
                    num(std::abs(s))});
  }
  out.files.push_back({"momo.csv", csv});
  out.results = {{"value", res.value},
                 {"b_K", blocks.b.back()},
                 {"growth_ok", blocks.growth_ok},
                 {"zero_density", blocks.zero_density}};
  add_threshold_checks(out, "value", res.value, p.expect_below, p.expect_above);
  return out;
}

// ---- dbar

struct DbarParams {
  std::string P = "bernoulli:0.3";
  std::string Q = "bernoulli:0.5";
  std::vector<unsigned> k{1, 2, 3};
  double N = 1e5;
  unsigned A = 2;  // alphabet of csv: inputs
  std::string solver = "automatic";
  bool strict = false;
};

dbar::BlockDistribution make_distribution(const std::string& key, const std::string& spec, unsigned k, std::size_t n,
                                          unsigned alphabet, const Common& common) {
  const auto [name, rest] = head_tail(spec);
  if (name == "bernoulli") {
    const double q = parse_double(key, rest);
    if (!(q >= 0 && q <= 1)) throw UsageError(key, "bernoulli parameter outside [0,1]");
    return dbar::bernoulli_blocks(q, k);
  }
  if (name == "csv") {
    std::ifstream is(rest);
    if (!is) throw UsageError(key, "cannot open " + rest);
    dbar::BlockDistribution d;
    try {
      d = dbar::read_csv(is, alphabet);
    } catch (const InvalidArgument& e) {
      throw UsageError(key, e.what());
    }
    if (d.k != k) throw UsageError(key, "file holds " + std::to_string(d.k) + "-blocks, asked for " + std::to_string(k));
    return d;
  }
  if (name == "seq") {
    const auto u = sequence_for(common, rest, n + k);
    if (!u.integral()) throw UsageError(key, "seq: needs a +-1/0 valued sequence");
    // -1 -> 0, 1 -> 1, 0 -> 2
    std::vector<int> sym(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = u.values()[i].real();
      sym[i] = v < 0 ? 0 : (v > 0 ? 1 : 2);
      if (sym[i] >= static_cast<int>(alphabet)) throw UsageError(key, "symbol outside the alphabet");
    }
    return dbar::empirical_blocks(sym, alphabet, k, n);
  }
  throw UsageError(key, "expected bernoulli:P, csv:PATH or seq:SPEC");
}

Outcome run_dbar(const DbarParams& p, const Common& common) {
  dbar::Options opts;
  if (p.solver == "automatic") opts.solver = dbar::Solver::automatic;
  else if (p.solver == "exact") opts.solver = dbar::Solver::exact;
  else if (p.solver == "entropic") opts.solver = dbar::Solver::entropic;
  else throw UsageError("--solver", "expected automatic, exact or entropic");
  opts.strict = p.strict;
  if (p.k.empty()) throw UsageError("--k", "needs at least one block length");
  const std::size_t n = to_count("--N", p.N);
  Outcome out;
  std::string csv = csv_row({"k", "dbar", "solver", "epsilon", "converged", "iterations"});
  bool converged = true;
  json rows = json::array();
  // seq: inputs share one alphabet: {-1, 1}, plus 0 when either side has a zero
  unsigned seq_alphabet = 2;
  for (const auto* spec : {&p.P, &p.Q}) {
    const auto [name, rest] = head_tail(*spec);
    if (name != "seq") continue;
    const auto u = sequence_for(common, rest, n + *std::max_element(p.k.begin(), p.k.end()));
    for (const auto& x : u.values()) {
      if (x == Complex{0.0, 0.0}) seq_alphabet = 3;
    }
  }
  for (unsigned k : p.k) {
    if (k == 0) throw UsageError("--k", "block length must be positive");
    const auto alph = [&](const std::string& spec) { return head_tail(spec).first == "seq" ? seq_alphabet : p.A; };
    const auto P = make_distribution("--P", p.P, k, n, alph(p.P), common);
    const auto Q = make_distribution("--Q", p.Q, k, n, alph(p.Q), common);
    if (P.A != Q.A) throw UsageError("--Q", "alphabet differs from --P");
    const auto r = dbar::dbar_k(P, Q, opts);
    const bool exact = r.plan.solver == dbar::Solver::exact;
    csv += csv_row({std::to_string(k), num(r.value), exact ? "exact" : "entropic", num(r.plan.epsilon),
                    r.plan.converged ? "1" : "0", num(std::uint64_t{r.plan.iterations})});
    converged = converged && r.plan.converged;
    rows.push_back({{"k", k}, {"dbar", r.value}});
  }
  out.files.push_back({"dbar.csv", csv});
  out.results = {{"dbar", rows}};
  out.checks.push_back({"solver_converged", converged, json::object()});
  return out;
}

// ---- kronecker

struct KroneckerParams {
  unsigned p = 2;
  std::size_t depth = 5;
  std::size_t samples = 64;
};

Outcome run_kronecker(const KroneckerParams& p, const Common&) {
  if (!kronecker::is_prime(p.p)) throw UsageError("--p", "must be prime");
  if (p.depth == 0 || p.depth > 20) throw UsageError("--depth", "must be in [1, 20]");
  if (p.samples == 0) throw UsageError("--samples", "must be positive");
  kronecker::BuildOptions opts;
  opts.samples_per_arc = p.samples;
  const auto res = kronecker::build(p.p, p.depth, opts);
  std::ostringstream arcs;
  kronecker::write_arcs_csv(res.levels, arcs);
  Outcome out;
  out.files.push_back({"kronecker.csv", arcs.str()});
  json certs = json::array();
  for (const auto& c : res.certificates) {
    certs.push_back({{"n", c.n},
                     {"k_n", c.k},
                     {"epsilon", c.epsilon},
                     {"worst", c.worst},
                     {"slack", c.slack},
                     {"bound", c.bound},
                     {"ok", c.ok},
                     {"function", c.function}});
    out.checks.push_back({"certificate_" + std::to_string(c.n), c.ok, {{"worst", c.worst}, {"bound", c.bound}}});
  }
  bool disjoint = true, nested = true;
  for (std::size_t l = 1; l < res.levels.size(); ++l) {
    disjoint = disjoint && kronecker::disjoint(res.levels[l]);
    nested = nested && kronecker::nested(res.levels[l], res.levels[l - 1]);
  }
  out.checks.push_back({"disjoint", disjoint, json::object()});
  out.checks.push_back({"nested", nested, json::object()});
  out.results = {{"arcs", res.final_set().arcs.size()}, {"certificates", certs}};
  return out;
}

// ---- universal

struct UniversalParams {
  std::vector<std::string> y{"0.41421356237309503"}, v{"0.25"};
  std::vector<std::int64_t> m1{1}, m2{1}, m3{1};
  std::uint64_t n_max = 1000;
  double M = 1000;
  double S = static_cast<double>(universal::kDefaultFiberSteps);
  std::uint64_t seed = 1;
  std::size_t a2_trials = 0;
};

Outcome run_universal(const UniversalParams& p, const Common&) {
  if (p.y.size() != p.v.size()) throw UsageError("--v", "needs as many coordinates as --y");
  const std::size_t samples = to_count("--M", p.M);
  const std::size_t steps = to_count("--S", p.S);
  universal::CharacterTriple f;
  try {
    f = universal::make_character(p.m1, p.m2, p.m3);
  } catch (const InvalidArgument& e) {
    throw UsageError("--m3", e.what());
  }
  if (f.dimension() != p.y.size()) throw UsageError("--m1", "character dimension differs from --y");
  bool uniform = false;
  std::vector<universal::CoordinateLaw> ylaw, vlaw;
  for (const auto* list : {&p.y, &p.v}) {
    auto& laws = list == &p.y ? ylaw : vlaw;
    for (const auto& s : *list) {
      if (s == "u") {
        uniform = true;
        laws.emplace_back(universal::UniformLaw{});
      } else {
        const double x = parse_double(list == &p.y ? "--y" : "--v", s);
        if (!(x >= 0 && x < 1)) throw UsageError(list == &p.y ? "--y" : "--v", "coordinate outside [0,1)");
        laws.emplace_back(universal::PointLaw{x});
      }
    }
  }
  universal::EtaSampler eta;
  try {
    if (uniform) {
      eta = universal::product_law(ylaw, vlaw, p.seed);
    } else {
      std::vector<double> y0, v0;
      for (const auto& l : ylaw) y0.push_back(std::get<universal::PointLaw>(l).value);
      for (const auto& l : vlaw) v0.push_back(std::get<universal::PointLaw>(l).value);
      eta = universal::point_mass({y0}, {v0}, p.seed);
    }
  } catch (const InvalidArgument& e) {
    throw UsageError("--y", e.what());
  }
  const auto report = universal::spectral_wzors_check(f, eta, p.n_max, samples, steps);
  Outcome out;
  std::string csv = csv_row({"n", "empirical_re", "empirical_im", "analytic_re", "analytic_im", "discrepancy"});
  for (const auto& r : report.rows) {
    csv += csv_row({num(r.n), num(r.empirical.real()), num(r.empirical.imag()), num(r.analytic.real()),
                    num(r.analytic.imag()), num(r.discrepancy)});
  }
  out.files.push_back({"universal.csv", csv});
  const double tol = uniform ? 4.0 / std::sqrt(static_cast<double>(samples)) : 1e-12;
  out.results = {{"max_discrepancy", report.max_discrepancy}, {"M", samples}, {"S", steps}, {"eta", uniform ? "product" : "point_mass"}};
  out.checks.push_back({"wzors_discrepancy", report.max_discrepancy <= tol,
                        {{"max_discrepancy", report.max_discrepancy}, {"bound", tol}}});

  if (p.a2_trials > 0) {
    const auto u = sequences::mobius(2000);
    const auto blocks = momo::make_blocks(momo::Poly{2}, 40);
    std::string a2 = csv_row({"trial", "t", "max_residual"});
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < p.a2_trials; ++trial) {
      const CounterRng rng(p.seed + trial);
      const std::size_t t = 1 + trial % 6;
      std::vector<systems::TorusPoint> pts;
      for (std::size_t k = 0; k < blocks.blocks(); ++k) {
        std::vector<double> c(2 * t);
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = rng.uniform(k, j);
        pts.push_back({c});
      }
      std::vector<std::int64_t> alpha(t), beta(t);
      for (std::size_t j = 0; j < t; ++j) {
        alpha[j] = static_cast<std::int64_t>(rng.bits(1000, j) % 101) - 50;
        beta[j] = static_cast<std::int64_t>(rng.bits(1001, j) % 101) - 50;
      }
      const double r = universal::a2_reduction_identity(alpha, beta, blocks, pts, u).max_residual;
      worst = std::max(worst, r);
      a2 += csv_row({num(trial), num(std::uint64_t{t}), num(r)});
    }
    out.files.push_back({"universal_a2.csv", a2});
    out.results["a2_max_residual"] = worst;
    out.checks.push_back({"a2_reduction", worst <= 1e-10, {{"max_residual", worst}, {"bound", 1e-10}}});
  }
  return out;
}

// ---- xcheck

struct XcheckParams {
  double N = 1e6;
  double alpha = 0.41421356237309503;
  std::uint64_t seed = 7;
  double us_H = 0;
  std::vector<double> H{256, 512, 1024, 2048, 4096};
  double pattern_H = 1024;
  double high = 0.9, low = 0.25;
};

Outcome run_xcheck(const XcheckParams& p, const Common& common) {
  const std::size_t n = to_count("--N", p.N);
  const std::size_t hu = p.us_H == 0 ? ghk::default_h(n) : to_count("--us-H", p.us_H);
  std::vector<std::size_t> hs;
  for (double h : p.H) {
    hs.push_back(to_count("--H", h));
    if (hs.back() >= n) throw UsageError("--H", "window length must be below N");
  }
  const std::size_t hpat = to_count("--pattern-H", p.pattern_H);
  const auto pat = std::find(hs.begin(), hs.end(), hpat);
  if (pat == hs.end()) throw UsageError("--pattern-H", "must be one of --H");
  const std::size_t pat_i = static_cast<std::size_t>(pat - hs.begin());
  const std::string a = format_number(p.alpha);
  const std::vector<std::pair<std::string, std::string>> seqs{
      {"linear", "phase:0," + a},
      {"quadratic", "phase:0,0," + a},
      {"random_signs", "random:" + std::to_string(p.seed)},
      {"mobius", "mobius"}};

  Outcome out;
  std::string header = "sequence,us2";
  for (auto h : hs) header += ",f1_" + std::to_string(h);
  std::string csv = header + '\n';
  json rows = json::array();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto u = sequence_for(common, seqs[i].second, std::max(n, n + 2 * hu));
    const double us2 = ghk::us_norm(u, 2, n, hu).value;
    std::vector<double> f;
    std::string row = seqs[i].first + ',' + num(us2);
    for (auto h : hs) {
      const std::size_t stride = fourier::default_stride(h);
      f.push_back(fourier::f1(u, h, fourier::max_windows(n, h, stride), stride));
      row += ',' + num(f.back());
    }
    csv += row + '\n';
    const bool high_expected = i == 0;
    auto in_band = [&](double v) { return high_expected ? v >= p.high : v <= p.low; };
    out.checks.push_back({seqs[i].first + "_us2", in_band(us2), {{"value", us2}}});
    out.checks.push_back({seqs[i].first + "_f1", in_band(f[pat_i]), {{"value", f[pat_i]}, {"H", hpat}}});
    if (!high_expected) {
      bool dec = true;
      for (std::size_t j = 1; j < f.size(); ++j) dec = dec && f[j] < f[j - 1];
      out.checks.push_back({seqs[i].first + "_f1_decreasing", dec, {{"values", f}}});
    }
    rows.push_back({{"sequence", seqs[i].first}, {"spec", seqs[i].second}, {"us2", us2}, {"f1", f}});
  }
  out.files.push_back({"xcheck.csv", csv});
  out.results = {{"rows", rows}, {"us_H", hu}};
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("--out", "cannot write " + path.string());
  os << contents;
}

json config_echo(const CLI::App& sub) {
  json cfg = json::object();
  for (const auto* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const auto res = opt->results();
    std::string joined;
    for (const auto& r : res) joined += (joined.empty() ? "" : ",") + r;
    cfg[opt->get_name()] = res.empty() ? opt->get_default_str() : joined;
  }
  return cfg;
}

}  // namespace

std::string format_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << x;
  return os.str();
}

BoundedSequence make_sequence(const std::string& spec, std::size_t n) {
  const auto [name, rest] = head_tail(spec);
  const std::string key = "--seq";
  if (name == "mobius" && rest.empty()) return sequences::mobius(n);
  if (name == "liouville" && rest.empty()) return sequences::liouville(n);
  if (name == "one" && rest.empty()) return sequences::constant(Complex{1.0, 0.0}, n);
  if (name == "random") return sequences::random_signs(n, parse_count(key, rest));
  if (name == "phase") {
    std::vector<double> c;
    for (const auto& s : split(rest, ',')) c.push_back(parse_double(key, s));
    if (c.empty() || c.size() > 5) throw UsageError(key, "phase needs 1 to 5 coefficients");
    return sequences::phase_sequence(c, n);
  }
  if (name == "mixed") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw UsageError(key, "mixed needs two frequencies");
    return sequences::two_atom(parse_double(key, parts[0]), parse_double(key, parts[1]), n);
  }
  throw UsageError(key, "unknown sequence '" + spec + "'");
}

BoundedSequence load_sequence(const std::string& spec, std::size_t n, const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return make_sequence(spec, n);
  std::string stem;
  for (char ch : spec) stem += std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_';
  const auto path = cache_dir / (stem + ".odsq");
  if (std::filesystem::exists(path)) {
    auto u = sequences::read_cache(path, spec);
    if (u.size() >= n) return u.size() == n ? u : u.prefix(n);
  }
  auto u = make_sequence(spec, n);
  std::filesystem::create_directories(cache_dir);
  sequences::write_cache(u, path);
  return u;
}

int run(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"orthodyn experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file with [subcommand] sections; flags override it");
  // lists are split by each option's own delimiter, so specs like phase:0,0,a survive
  app.get_config_formatter_base()->arrayDelimiter(';');
  Common common;
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (0: ORTHODYN_THREADS or hardware)");
  app.add_option("--cache", common.cache, "sequence cache directory");

  GhkParams ghk_p;
  auto* ghk_c = app.add_subcommand("ghk", "u^1 / u^s seminorm estimates");
  ghk_c->add_option("--seq", ghk_p.seq)->capture_default_str();
  ghk_c->add_option("--N", ghk_p.N)->capture_default_str();
  ghk_c->add_option("--H", ghk_p.H, "0: floor(N^(1/3))")->capture_default_str();
  ghk_c->add_option("--s", ghk_p.s)->capture_default_str();
  ghk_c->add_flag("--log", ghk_p.log);
  ghk_c->add_option("--expect-below", ghk_p.expect_below);
  ghk_c->add_option("--expect-above", ghk_p.expect_above);

  FourierParams fou_p;
  auto* fou_c = app.add_subcommand("fourier", "local 1-Fourier uniformity f1 per window length");
  fou_c->add_option("--seq", fou_p.seq)->capture_default_str();
  fou_c->add_option("--N", fou_p.N)->capture_default_str();
  fou_c->add_option("--H", fou_p.H)->delimiter(',');
  fou_c->add_option("--stride", fou_p.stride, "0: max(1, H/4)");
  fou_c->add_option("--windows", fou_p.windows, "0: as many as fit");
  fou_c->add_option("--grid", fou_p.grid)->capture_default_str();
  fou_c->add_flag("--log", fou_p.log);
  fou_c->add_flag("--expect-decreasing", fou_p.expect_decreasing);

  SpectralParams spe_p;
  auto* spe_c = app.add_subcommand("spectral", "autocorrelation atoms and Wiener sum");
  spe_c->add_option("--seq", spe_p.seq)->capture_default_str();
  spe_c->add_option("--N", spe_p.N)->capture_default_str();
  spe_c->add_option("--H", spe_p.H)->capture_default_str();
  spe_c->add_option("--grid", spe_p.grid, "0: 8H");
  spe_c->add_option("--tau", spe_p.tau)->capture_default_str();
  spe_c->add_option("--expect-atoms", spe_p.expect_atoms);

  MomoParams mom_p;
  auto* mom_c = app.add_subcommand("momo", "block functional along moving orbits");
  mom_c->add_option("--seq", mom_p.seq)->capture_default_str();
  mom_c->add_option("--N", mom_p.N, "0: b_K - 1");
  mom_c->add_option("--system", mom_p.system, "rotation:A[,B..] | a2 | a2alpha:A")->capture_default_str();
  mom_c->add_option("--freqs", mom_p.freqs)->delimiter(',');
  mom_c->add_option("--blocks", mom_p.blocks, "poly:D | geom:R")->capture_default_str();
  mom_c->add_option("--K", mom_p.K)->capture_default_str();
  mom_c->add_option("--points", mom_p.points, "random:SEED | adversarial:TRIALS:SEED")->capture_default_str();
  mom_c->add_flag("--log", mom_p.log);
  mom_c->add_option("--expect-below", mom_p.expect_below);
  mom_c->add_option("--expect-above", mom_p.expect_above);

  DbarParams dba_p;
  auto* dba_c = app.add_subcommand("dbar", "k-block d-bar distances");
  dba_c->add_option("--P", dba_p.P, "bernoulli:P | csv:PATH | seq:SPEC")->capture_default_str();
  dba_c->add_option("--Q", dba_p.Q)->capture_default_str();
  dba_c->add_option("--k", dba_p.k)->delimiter(',');
  dba_c->add_option("--N", dba_p.N, "symbols for seq: inputs")->capture_default_str();
  dba_c->add_option("--A", dba_p.A, "alphabet size for csv: inputs")->capture_default_str();
  dba_c->add_option("--solver", dba_p.solver)->capture_default_str();
  dba_c->add_flag("--strict", dba_p.strict);

  KroneckerParams kro_p;
  auto* kro_c = app.add_subcommand("kronecker", "p-Kronecker arc recursion with certificates");
  kro_c->add_option("--p", kro_p.p)->capture_default_str();
  kro_c->add_option("--depth", kro_p.depth)->capture_default_str();
  kro_c->add_option("--samples", kro_p.samples)->capture_default_str();

  UniversalParams uni_p;
  auto* uni_c = app.add_subcommand("universal", "spectral identity of A(y,v,z) = (y,v,y+z)");
  uni_c->add_option("--y", uni_p.y, "coordinates in [0,1) or u for uniform")->delimiter(',');
  uni_c->add_option("--v", uni_p.v)->delimiter(',');
  uni_c->add_option("--m1", uni_p.m1)->delimiter(',');
  uni_c->add_option("--m2", uni_p.m2)->delimiter(',');
  uni_c->add_option("--m3", uni_p.m3)->delimiter(',');
  uni_c->add_option("--n-max", uni_p.n_max)->capture_default_str();
  uni_c->add_option("--M", uni_p.M)->capture_default_str();
  uni_c->add_option("--S", uni_p.S)->capture_default_str();
  uni_c->add_option("--seed", uni_p.seed)->capture_default_str();
  uni_c->add_option("--a2-trials", uni_p.a2_trials)->capture_default_str();

  XcheckParams xck_p;
  auto* xck_c = app.add_subcommand("xcheck", "u^2 and f1 cross table of the four model sequences");
  xck_c->add_option("--N", xck_p.N)->capture_default_str();
  xck_c->add_option("--alpha", xck_p.alpha)->capture_default_str();
  xck_c->add_option("--seed", xck_p.seed)->capture_default_str();
  xck_c->add_option("--us-H", xck_p.us_H, "0: floor(N^(1/3))");
  xck_c->add_option("--H", xck_p.H)->delimiter(',');
  xck_c->add_option("--pattern-H", xck_p.pattern_H)->capture_default_str();
  xck_c->add_option("--high", xck_p.high)->capture_default_str();
  xck_c->add_option("--low", xck_p.low)->capture_default_str();

  std::vector<const char*> argv{"orthodyn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, errs;
    const int code = app.exit(e, out, errs);
    err << out.str() << errs.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (common.threads > 0) set_thread_count(common.threads);
  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    if (name == "ghk") outcome = run_ghk(ghk_p, common);
    else if (name == "fourier") outcome = run_fourier(fou_p, common);
    else if (name == "spectral") outcome = run_spectral(spe_p, common);
    else if (name == "momo") outcome = run_momo(mom_p, common);
    else if (name == "dbar") outcome = run_dbar(dba_p, common);
    else if (name == "kronecker") outcome = run_kronecker(kro_p, common);
    else if (name == "universal") outcome = run_universal(uni_p, common);
    else outcome = run_xcheck(xck_p, common);
  } catch (const UsageError& e) {
    err << "orthodyn " << name << ": invalid parameter " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "orthodyn " << name << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = true;
  json checks = json::array();
  for (const auto& c : outcome.checks) {
    ok = ok && c.pass;
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  json summary = {{"command", name},
                  {"config", config_echo(*sub)},
                  {"wall_time_s", wall},
                  {"threads", thread_count()},
                  {"results", outcome.results},
                  {"checks", checks},
                  {"ok", ok}};
  try {
    const std::filesystem::path dir(common.out);
    std::filesystem::create_directories(dir);
    for (const auto& f : outcome.files) write_file(dir / f.file, f.contents);
    write_file(dir / (name + ".json"), summary.dump(2) + '\n');
  } catch (const std::exception& e) {
    err << "orthodyn " << name << ": " << e.what() << '\n';
    return kExitUsage;
  }
  for (const auto& c : outcome.checks) {
    if (!c.pass) err << "orthodyn " << name << ": check failed: " << c.name << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace orthodyn::cli
