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

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "orthodyn/common.hpp"
#include "orthodyn/sequences.hpp"

/// Experiment runner behind the orthodyn binary. Every subcommand writes
/// <out>/<name>.csv (fixed header, 17 significant digits, classic locale) and
/// <out>/<name>.json (config echo, wall time, checks).
namespace orthodyn::cli {

// A parameter failed validation; key names the offending option.
class UsageError : public Error {
 public:
  UsageError(const std::string& key, const std::string& what) : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// mobius, liouville, one, random:SEED, phase:c0,c1,..., mixed:ALPHA,BETA.
sequences::BoundedSequence make_sequence(const std::string& spec, std::size_t n);
// make_sequence through a cache directory of ODSQ1 files keyed by spec.
sequences::BoundedSequence load_sequence(const std::string& spec, std::size_t n,
                                         const std::filesystem::path& cache_dir);

// 17 significant digits, '.' separator.
std::string format_number(double x);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Messages go to err.
int run(const std::vector<std::string>& args, std::ostream& err);

}  // namespace orthodyn::cli
