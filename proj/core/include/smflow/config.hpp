// Copyright 2026 The smflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smflow/experiments.hpp"

namespace smflow {

enum class Experiment { Simulate, CheckCompat, SweepEps, Converge, Longrun };

const char* to_string(Experiment e);
const char* to_string(Scheme s);
const char* to_string(Renormalize r);

/// Everything a run needs. Text form is INI-like:
///
///   [domain]   dims, nodes (one count or a comma list per axis)
///   [initial]  family, amplitudes, amplitude, blend_width, mode_count, omega
///   [flow]     eps, scheme, dt, fp_tol, fp_max_iters, renormalize,
///              renormalize_stages, cfl_constant, override_cfl
///   [run]      experiment, t_final, monitor_stride, output_dir, keep_snapshots
///   [compat]   order, c0
///   [sweep]    eps_list, concurrent
///   [converge] nodes_list, reference_nodes, dt0, min_order
///   [longrun]  t_long, record_stride, bound_constant, flat_window
///   [perturb]  delta, times
///
/// '#' and ';' start comments. Unknown sections or keys are errors.
struct RunConfig {
  int dims = 1;
  std::vector<int> nodes{256};
  InitialDataSpec initial{};
  FlowParams flow{};

  Experiment experiment = Experiment::Simulate;
  double t_final = 1.0;
  std::size_t monitor_stride = 100;
  std::string output_dir = "out";
  bool keep_snapshots = true;

  int compat_order = 2;
  double compat_c0 = 10.0;

  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125, 0.0};
  bool sweep_concurrent = true;

  std::vector<int> nodes_list{65, 129, 257};
  int reference_nodes = 1025;
  double dt0 = 1e-3;
  double min_order = 1.8;

  double t_long = 10.0;
  std::size_t record_stride = 100;
  double bound_constant = kLongRunBoundConstant;
  double flat_window = 1.0;

  double delta = 1e-6;
  std::vector<double> perturb_times{0.1};

  BoxGrid grid() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigIssue {
  int line = 0;  ///< 1-based; 0 for checks that span the whole config
  std::string message;
};

struct ConfigParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigIssue> errors;

  bool ok() const { return config.has_value(); }
  /// One "line N: message" entry per line.
  std::string error_text() const;
};

/// Parses and validates. On any error `config` is empty and every problem found
/// is listed.
ConfigParseResult parse_config(std::string_view text);

/// Reads a file and parses it; a missing file becomes a line-0 error.
ConfigParseResult load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& config);

/// Whole-config constraints (the ones that do not belong to a single line).
std::vector<std::string> validate_config(const RunConfig& config);

}  // namespace smflow
