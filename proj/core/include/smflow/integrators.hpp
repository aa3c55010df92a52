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

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smflow/invariants.hpp"
#include "smflow/sphere_geometry.hpp"

namespace smflow {

enum class Scheme { Rk4Projected, ImplicitMidpoint };

enum class Renormalize {
  Auto,  ///< off for (implicit midpoint, eps = 0), on otherwise
  On,
  Off
};

struct FlowParams {
  double eps = 0.0;
  Scheme scheme = Scheme::ImplicitMidpoint;
  double dt = 1e-4;
  double fp_tol = 1e-12;  ///< max-norm residual target of the implicit solve
  int fp_max_iters = 200;
  Renormalize renormalize = Renormalize::Auto;
  bool renormalize_stages = false;  ///< RK4: also renormalize every stage value
  double cfl_constant = 0.25;
  bool override_cfl = false;

  friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

/// Whether the step ends with u <- u/|u| under `params`.
bool renormalizes(const FlowParams& params);

/// Checks eps, dt, solver budget, and (for the explicit scheme) the
/// dt <= cfl_constant * h^2 limit. Throws InvalidArgument naming the violated
/// invariant.
void validate_flow_params(const FlowParams& params, const BoxGrid& grid);

struct FlowState {
  double t = 0.0;
  SphereField u;
  std::size_t step_count = 0;
};

struct StepResult {
  FlowState state;
  int iterations = 1;  ///< residual evaluations of the implicit solve (1 for RK4)
};

/// Classical RK4 on the extrinsic LLG right-hand side followed by nodewise
/// renormalization. Throws IntegrationBlowup on NaN/Inf.
StepResult step_rk4_projected(const FlowState& state, const FlowParams& params);

/// Implicit midpoint u+ = u + dt F((u + u+)/2), solved by Newton iteration
/// with the exact Jacobian (block tridiagonal in 1D, sparse LU otherwise).
/// A negative dt integrates backwards. Throws StepFailure when the residual
/// does not reach fp_tol within fp_max_iters evaluations.
StepResult step_implicit_midpoint(const FlowState& state, const FlowParams& params);

/// Dispatches on params.scheme.
StepResult step(const FlowState& state, const FlowParams& params);

struct TrajectorySample {
  std::size_t step = 0;
  InvariantRecord record;
  std::optional<SphereField> field;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  FlowState final_state;
  int max_iterations = 0;
  bool failed = false;
  std::string failure;
};

struct AdvanceOptions {
  std::size_t monitor_stride = 100;
  bool keep_fields = false;
  bool sobolev = true;
  /// Called after every accepted step; returning false stops the run early.
  std::function<bool(const FlowState&)> on_step;
};

/// Steps from state.t to t_final (the last step is shortened to hit t_final
/// exactly), recording invariants at the start, every monitor_stride steps and
/// at the end. Step errors end the run with `failed` set and the partial
/// trajectory kept.
Trajectory advance(const FlowState& state, const FlowParams& params, double t_final,
                   const AdvanceOptions& options = {});

}  // namespace smflow
