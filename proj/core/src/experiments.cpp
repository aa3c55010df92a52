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

#include "smflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace smflow {

double l2_distance(const VectorField& a, const VectorField& b) {
  if (!(a.grid() == b.grid())) throw GridError("l2_distance: grids differ");
  ScalarField d(a.grid());
  for (std::size_t p = 0; p < a.size(); ++p) d[p] = norm2(a[p] - b[p]);
  return std::sqrt(integrate(d));
}

std::optional<double> observed_order(double coarse, double fine, double ratio) {
  if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine)) return std::nullopt;
  return std::log(coarse / fine) / std::log(ratio);
}

namespace {

// Runs fn(i) for i in [0, n) and returns the results in index order.
template <class Fn>
auto run_indexed(std::size_t n, bool concurrent, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(n);
  if (!concurrent) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> pending;
  pending.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pending.push_back(std::async(std::launch::async, fn, i));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

AdvanceOptions quiet_monitor(std::size_t stride) {
  AdvanceOptions opt;
  opt.monitor_stride = stride;
  opt.sobolev = false;
  return opt;
}

constexpr std::size_t kNoRecords = std::numeric_limits<std::size_t>::max();

}  // namespace

// ---------------------------------------------------------------------------

std::optional<double> SweepResult::distance_for(double eps) const {
  for (const auto& r : runs)
    if (r.eps == eps) return r.distance;
  return std::nullopt;
}

bool SweepResult::monotone(double slack) const {
  std::optional<double> prev;
  for (const auto& r : runs) {
    if (!r.distance) return false;
    if (prev && *r.distance > (1.0 + slack) * *prev) return false;
    prev = r.distance;
  }
  return true;
}

void validate_sweep_plan(const SweepPlan& plan) {
  if (plan.eps_list.empty()) throw InvalidArgument("eps_list must not be empty");
  for (double e : plan.eps_list)
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
  if (!std::is_sorted(plan.eps_list.rbegin(), plan.eps_list.rend()) ||
      std::adjacent_find(plan.eps_list.begin(), plan.eps_list.end()) != plan.eps_list.end())
    throw InvalidArgument("eps_list must be strictly descending");
  if (plan.eps_list.back() != 0.0) throw InvalidArgument("eps_list must contain 0 as the reference");
  if (!(plan.t_final > 0.0)) throw InvalidArgument("t_final must be positive");
  for (double e : plan.eps_list) {
    FlowParams p = plan.params;
    p.eps = e;
    validate_flow_params(p, plan.grid);
  }
}

SweepResult viscosity_sweep(const SweepPlan& plan) {
  validate_sweep_plan(plan);
  const SphereField u0 = generate_initial_data(plan.initial, plan.grid);
  auto trajectories = run_indexed(plan.eps_list.size(), plan.concurrent, [&](std::size_t i) {
    FlowParams p = plan.params;
    p.eps = plan.eps_list[i];
    return advance(FlowState{0.0, u0, 0}, p, plan.t_final, quiet_monitor(plan.monitor_stride));
  });

  SweepResult result;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    SweepRun run{plan.eps_list[i], std::move(trajectories[i]), std::nullopt};
    if (run.trajectory.failed) {
      result.failed = true;
      if (result.failure.empty()) {
        std::ostringstream msg;
        msg << "eps=" << run.eps << ": " << run.trajectory.failure;
        result.failure = msg.str();
      }
    }
    result.runs.push_back(std::move(run));
  }
  const Trajectory& reference = result.runs.back().trajectory;
  for (auto& run : result.runs)
    if (!run.trajectory.failed && !reference.failed)
      run.distance = l2_distance(run.trajectory.final_state.u, reference.final_state.u);

  for (std::size_t i = 0; i + 1 < result.runs.size(); ++i) {
    const SweepRun& a = result.runs[i];
    const SweepRun& b = result.runs[i + 1];
    if (b.eps == 0.0) break;
    std::optional<double> order;
    if (a.distance && b.distance) order = observed_order(*a.distance, *b.distance, a.eps / b.eps);
    result.orders.push_back(order);
  }
  return result;
}

// ---------------------------------------------------------------------------

double convergence_dt(const ConvergencePlan& plan, int nodes) {
  const double ratio = static_cast<double>(plan.nodes_list.front() - 1) / static_cast<double>(nodes - 1);
  return plan.dt0 * ratio * ratio;
}

void validate_convergence_plan(const ConvergencePlan& plan) {
  if (plan.nodes_list.size() < 2) throw InvalidArgument("nodes_list needs at least two grids");
  if (plan.dims < 1 || plan.dims > 3) throw InvalidArgument("dims must be 1, 2 or 3");
  if (!(plan.t_final > 0.0) || !(plan.dt0 > 0.0)) throw InvalidArgument("t_final and dt0 must be positive");
  auto dyadic = [](int coarse, int fine) {
    if (coarse < 3 || fine < coarse || (fine - 1) % (coarse - 1) != 0) return false;
    const int r = (fine - 1) / (coarse - 1);
    return (r & (r - 1)) == 0;
  };
  for (std::size_t i = 0; i + 1 < plan.nodes_list.size(); ++i)
    if (!dyadic(plan.nodes_list[i], plan.nodes_list[i + 1]) || plan.nodes_list[i] == plan.nodes_list[i + 1])
      throw InvalidArgument("nodes_list must be nested: each N-1 must double");
  if (!dyadic(plan.nodes_list.back(), plan.reference_nodes) || plan.reference_nodes == plan.nodes_list.back())
    throw InvalidArgument("reference_nodes - 1 must be a power-of-two multiple of the finest N - 1");
  for (int n : plan.nodes_list) {
    FlowParams p = plan.params;
    p.dt = convergence_dt(plan, n);
    validate_flow_params(p, BoxGrid(plan.dims, n));
  }
}

namespace {

double restricted_error(const SphereField& coarse, const SphereField& fine) {
  const BoxGrid& gc = coarse.grid();
  const BoxGrid& gf = fine.grid();
  const int ratio = (gf.nodes(0) - 1) / (gc.nodes(0) - 1);
  ScalarField d(gc);
  for (std::size_t p = 0; p < gc.size(); ++p) {
    std::size_t q = 0;
    for (int a = 0; a < gc.dims(); ++a)
      q += static_cast<std::size_t>(gc.axis_index(p, a) * ratio) * gf.stride(a);
    d[p] = norm2(coarse[p] - fine[q]);
  }
  return std::sqrt(integrate(d));
}

struct ConvergenceRun {
  Trajectory trajectory;
  double e0 = 0.0;
  std::optional<double> q0;
};

}  // namespace

ConvergenceResult mesh_convergence(const ConvergencePlan& plan) {
  validate_convergence_plan(plan);
  std::vector<int> all = plan.nodes_list;
  all.push_back(plan.reference_nodes);
  const bool track_q = plan.dims == 1 && plan.params.eps == 0.0;

  auto runs = run_indexed(all.size(), plan.concurrent, [&](std::size_t i) {
    const BoxGrid grid(plan.dims, all[i]);
    const SphereField u0 = generate_initial_data(plan.initial, grid);
    FlowParams p = plan.params;
    p.dt = convergence_dt(plan, all[i]);
    ConvergenceRun r{advance(FlowState{0.0, u0, 0}, p, plan.t_final, quiet_monitor(kNoRecords)),
                     dirichlet_energy(u0), std::nullopt};
    if (track_q) r.q0 = q_invariant(u0);
    return r;
  });

  ConvergenceResult result;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (runs[i].trajectory.failed) {
      result.failed = true;
      result.failure = "N=" + std::to_string(all[i]) + ": " + runs[i].trajectory.failure;
      return result;
    }

  const SphereField& ref = runs.back().trajectory.final_state.u;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const SphereField& u = runs[i].trajectory.final_state.u;
    ConvergenceLevel level;
    level.nodes = all[i];
    level.dt = convergence_dt(plan, all[i]);
    level.field_error = restricted_error(u, ref);
    level.energy_drift = std::fabs(dirichlet_energy(u) - runs[i].e0) / std::max(std::fabs(runs[i].e0), 1e-12);
    if (track_q) level.q_drift = relative_drift(*runs[i].q0, q_invariant(u));
    result.levels.push_back(level);
  }
  for (std::size_t i = 0; i + 1 < result.levels.size(); ++i) {
    const auto& a = result.levels[i];
    const auto& b = result.levels[i + 1];
    const double r = static_cast<double>(b.nodes - 1) / static_cast<double>(a.nodes - 1);
    result.field_orders.push_back(observed_order(a.field_error, b.field_error, r));
    result.energy_orders.push_back(observed_order(a.energy_drift, b.energy_drift, r));
    if (track_q) result.q_orders.push_back(observed_order(*a.q_drift, *b.q_drift, r));
  }
  return result;
}

// ---------------------------------------------------------------------------

LongRunResult global_existence_proxy(const SphereField& u0, const FlowParams& params, const LongRunOptions& options) {
  if (u0.grid().dims() != 1) throw InvalidArgument("global_existence_proxy is defined on 1D grids only");
  if (params.eps != 0.0) throw InvalidArgument("global_existence_proxy requires eps = 0");
  if (!(options.t_long > 0.0)) throw InvalidArgument("t_long must be positive");
  const CompatReport ladder = check_cc_tilde(u0, 2);
  if (!ladder.pass)
    throw InvalidArgument("initial data fails the order-2 covariant compatibility ladder (max scaled residual " +
                          std::to_string(ladder.max_scaled_residual) + ")");

  LongRunResult result;
  const std::size_t stride = std::max<std::size_t>(options.record_stride, 1);
  auto sample = [&](const FlowState& s) {
    LongRunSample x;
    x.t = s.t;
    x.h1 = sobolev_seminorm(s.u, 1).seminorm;
    x.h2 = sobolev_seminorm(s.u, 2).seminorm;
    x.h3 = sobolev_seminorm(s.u, 3).seminorm;
    x.kinetic = kinetic_energy(s.u);
    x.kinetic_gradient = kinetic_gradient_energy(s.u);
    result.history.push_back(x);
  };

  FlowState start{0.0, u0, 0};
  sample(start);
  AdvanceOptions opt = quiet_monitor(kNoRecords);
  opt.on_step = [&](const FlowState& s) {
    if (s.step_count % stride == 0 || s.t == options.t_long) sample(s);
    return true;
  };
  const Trajectory traj = advance(start, params, options.t_long, opt);

  const double h1_full = sobolev_seminorm(u0, 1).full_norm;
  const double base = std::pow(h1_full * h1_full + 1.0, 3);
  const double tau0 = integrate_norm2(tension_field(u0));
  result.bound_rhs = options.bound_constant * base + tau0;
  for (const auto& x : result.history) {
    result.sup_lhs = std::max(result.sup_lhs, x.h2 * x.h2 + x.kinetic);
    result.h2_sup = std::max(result.h2_sup, x.h2);
    if (x.t <= options.flat_window) result.h2_window_max = std::max(result.h2_window_max, x.h2);
  }
  result.sup_ratio = (result.sup_lhs - tau0) / base;
  result.flatness = result.h2_window_max > 0.0 ? result.h2_sup / result.h2_window_max : 1.0;

  std::ostringstream diag;
  if (traj.failed) {
    diag << "run stopped at t=" << traj.final_state.t << ": " << traj.failure;
    result.pass = false;
  } else {
    result.pass = result.sup_lhs <= result.bound_rhs;
    diag << "sup(|u_xx|^2 + |u_t|^2) = " << result.sup_lhs << (result.pass ? " <= " : " > ") << "bound "
         << result.bound_rhs;
  }
  result.diagnostics = diag.str();
  return result;
}

// ---------------------------------------------------------------------------

TangentField default_perturbation_direction(const SphereField& u0) {
  const BoxGrid& g = u0.grid();
  TangentField d(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = g.position(p);
    double shape = 1.0;
    for (int a = 0; a < g.dims(); ++a) shape *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x[static_cast<std::size_t>(a)]));
    Vec3 t = project_tangent(u0[p], Vec3{0.0, 1.0, 0.0});
    if (norm(t) < 0.5) t = project_tangent(u0[p], Vec3{1.0, 0.0, 0.0});
    d[p] = shape * (t / norm(t));
  }
  const double n = std::sqrt(integrate_norm2(d));
  for (auto& v : d.values()) v = v / n;
  return d;
}

PerturbationReport perturbation_stability(const SphereField& u0, const VectorField& direction, double delta,
                                          const std::vector<double>& times, const FlowParams& params) {
  if (!(direction.grid() == u0.grid())) throw GridError("perturbation direction lives on a different grid");
  if (!std::isfinite(delta) || delta < 0.0) throw InvalidArgument("delta must be finite and nonnegative");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw InvalidArgument("times must be ascending and nonnegative");

  PerturbationReport report;
  SphereField up = u0;
  if (delta > 0.0) {
    const TangentField t = project_tangent(u0, direction);
    const double n = std::sqrt(integrate_norm2(t));
    if (!(n > 0.0)) throw InvalidArgument("perturbation direction has no tangent component");
    for (std::size_t p = 0; p < up.size(); ++p) up[p] = u0[p] + (delta / n) * t[p];
    renormalize(up);
  }
  report.delta_norm = l2_distance(up, u0);
  report.identical_trajectories = report.delta_norm == 0.0;
  report.perturbed_boundary_flux = boundary_flux_max(up);
  const CompatReport cc0 = check_cc0(up);
  if (!cc0.pass) {
    std::ostringstream w;
    w << "perturbed data fails CC0: max boundary residual " << cc0.max_scaled_residual << " exceeds "
      << cc0.tolerance_used;
    report.cc0_warning = w.str();
  }

  FlowState a{0.0, u0, 0};
  FlowState b{0.0, up, 0};
  for (double t : times) {
    for (FlowState* s : {&a, &b}) {
      Trajectory tr = advance(*s, params, t, quiet_monitor(kNoRecords));
      if (tr.failed) throw Error("perturbation run failed: " + tr.failure);
      *s = std::move(tr.final_state);
    }
    PerturbationSample x{t, l2_distance(a.u, b.u), std::nullopt};
    if (!report.identical_trajectories) x.ratio = x.distance / report.delta_norm;
    report.samples.push_back(x);
  }
  return report;
}

}  // namespace smflow
