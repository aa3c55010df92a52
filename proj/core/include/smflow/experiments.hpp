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
#include <optional>
#include <string>
#include <vector>

#include "smflow/compatibility.hpp"
#include "smflow/integrators.hpp"

namespace smflow {

/// (integral |a - b|^2)^(1/2) with trapezoid weights. Grids must match.
double l2_distance(const VectorField& a, const VectorField& b);

// ---------------------------------------------------------------------------
// Vanishing-viscosity sweep

struct SweepPlan {
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125, 0.0};  ///< descending, must contain 0
  BoxGrid grid{1, 256};
  double t_final = 0.25;
  FlowParams params{};  ///< eps is overwritten per member
  InitialDataSpec initial{};
  std::size_t monitor_stride = 100;
  bool concurrent = true;
};

struct SweepRun {
  double eps = 0.0;
  Trajectory trajectory;
  std::optional<double> distance;  ///< to the eps = 0 member at t_final; absent if either failed
};

struct SweepResult {
  std::vector<SweepRun> runs;  ///< plan order
  /// orders[i] = log(d_i / d_{i+1}) / log(eps_i / eps_{i+1}) for consecutive
  /// positive eps; absent when a distance is missing or zero.
  std::vector<std::optional<double>> orders;
  bool failed = false;
  std::string failure;

  std::optional<double> distance_for(double eps) const;
  /// d(eps) nonincreasing as eps decreases, allowing d_{i+1} <= (1 + slack) d_i.
  bool monotone(double slack = 0.05) const;
};

/// Throws InvalidArgument when eps_list is unsorted or lacks 0.
void validate_sweep_plan(const SweepPlan& plan);

SweepResult viscosity_sweep(const SweepPlan& plan);

// ---------------------------------------------------------------------------
// Mesh convergence

struct ConvergencePlan {
  std::vector<int> nodes_list{65, 129, 257};  ///< per-axis node counts, (N-1) doubling
  int reference_nodes = 1025;
  int dims = 1;
  double t_final = 0.1;
  /// dt for nodes_list.front(); finer grids use dt0 * (h/h0)^2.
  double dt0 = 1e-3;
  FlowParams params{};
  InitialDataSpec initial{};
  bool concurrent = true;
};

struct ConvergenceLevel {
  int nodes = 0;
  double dt = 0.0;
  double field_error = 0.0;  ///< L2 on the coarse nodes against the reference
  double energy_drift = 0.0;
  std::optional<double> q_drift;  ///< 1D, eps = 0
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  std::vector<std::optional<double>> field_orders;   ///< between consecutive levels
  std::vector<std::optional<double>> energy_orders;
  std::vector<std::optional<double>> q_orders;
  bool failed = false;
  std::string failure;
};

/// dt used for a grid with `nodes` points per axis under the plan's h^2 rule.
double convergence_dt(const ConvergencePlan& plan, int nodes);

/// Throws InvalidArgument unless every (N-1) divides (reference-1) by a power of two.
void validate_convergence_plan(const ConvergencePlan& plan);

ConvergenceResult mesh_convergence(const ConvergencePlan& plan);

/// log(coarse / fine) / log(ratio); absent when either value is zero or not finite.
std::optional<double> observed_order(double coarse, double fine, double ratio = 2.0);

// ---------------------------------------------------------------------------
// Long-time 1D run

/// Frozen constant of the long-run bound; see README for its calibration.
inline constexpr double kLongRunBoundConstant = 0.8574;

struct LongRunOptions {
  double t_long = 10.0;
  std::size_t record_stride = 100;
  double bound_constant = kLongRunBoundConstant;
  /// Window [0, flat_window] whose H2 maximum sets the flatness reference.
  double flat_window = 1.0;
};

struct LongRunSample {
  double t = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
  double kinetic = 0.0;  ///< integral |u_t|^2
  double kinetic_gradient = 0.0;  ///< integral |u_tx|^2, recorded without a bound
};

struct LongRunResult {
  std::vector<LongRunSample> history;
  double bound_rhs = 0.0;      ///< C (|u0|^2_H1 + 1)^3 + integral |tau(u0)|^2
  double sup_lhs = 0.0;        ///< sup_t (integral |u_xx|^2 + integral |u_t|^2)
  double sup_ratio = 0.0;      ///< (sup_lhs - integral |tau(u0)|^2) / (|u0|^2_H1 + 1)^3
  double h2_window_max = 0.0;  ///< max H2 seminorm on [0, flat_window]
  double h2_sup = 0.0;
  double flatness = 0.0;  ///< h2_sup / h2_window_max (1 when both vanish)
  bool pass = false;
  std::string diagnostics;
};

/// 1D, eps = 0 run to t_long. Throws InvalidArgument on a non-1D grid,
/// eps != 0 or data failing the order-2 covariant ladder.
LongRunResult global_existence_proxy(const SphereField& u0, const FlowParams& params,
                                     const LongRunOptions& options = {});

// ---------------------------------------------------------------------------
// Perturbation stability

/// Unit-L2 tangent field at u0 supported away from the boundary: the product
/// of (1 - cos 2 pi x_a)/2 times the normalized projection of e_y (e_x where
/// e_y is nearly normal).
TangentField default_perturbation_direction(const SphereField& u0);

struct PerturbationSample {
  double t = 0.0;
  double distance = 0.0;
  std::optional<double> ratio;  ///< distance / delta_norm; absent for delta = 0
};

struct PerturbationReport {
  double delta_norm = 0.0;  ///< L2 norm of the actual perturbation after renormalizing
  bool identical_trajectories = false;
  std::optional<std::string> cc0_warning;
  double perturbed_boundary_flux = 0.0;
  std::vector<PerturbationSample> samples;
};

/// Perturbs u0 by delta * P(u0) direction, renormalizes, and compares the two
/// trajectories at each requested time (ascending).
PerturbationReport perturbation_stability(const SphereField& u0, const VectorField& direction, double delta,
                                          const std::vector<double>& times, const FlowParams& params);

}  // namespace smflow
