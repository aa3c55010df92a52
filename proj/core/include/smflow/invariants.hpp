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

#include <array>
#include <optional>

#include "smflow/sphere_geometry.hpp"

namespace smflow {

/// Values of the monitored functionals at one time sample. Quantities that do
/// not apply to the run (1D-only, eps=0-only, eps>0-only) stay empty.
struct InvariantRecord {
  double t = 0.0;
  double sphere_violation = 0.0;
  double dirichlet_energy = 0.0;
  std::optional<double> q_value;
  std::optional<double> h2_identity_residual;
  std::array<std::optional<double>, 3> sobolev;  // seminorms for k = 1, 2, 3
  double boundary_flux_max = 0.0;
  std::optional<double> eps_dissipation_rate;

  friend bool operator==(const InvariantRecord&, const InvariantRecord&) = default;
};

/// Dirichlet energy integrate(|grad u|^2) with the mirror central gradient.
double dirichlet_energy(const SphereField& u);

/// Summation-by-parts form -integrate(<u, Laplacian u>). For the mirror
/// Laplacian and trapezoid weights this equals sum |u[i+1]-u[i]|^2 / h over
/// edges exactly; it is the energy the implicit midpoint scheme conserves.
double dirichlet_energy_sbp(const SphereField& u);

/// Q = integrate(|u x u_xx|^2) - 1/4 integrate(|u_x|^4). 1D and eps = 0 only.
double q_invariant(const SphereField& u, double eps = 0.0);
/// Q with |u_t|^2 evaluated as |tau(u)|^2.
double q_invariant_tension_route(const SphereField& u);
/// Q with |u x u_xx|^2 evaluated as |u_xx|^2 - <u, u_xx>^2.
double q_invariant_identity_route(const SphereField& u);

/// | integrate(|u_xx|^2) - 5/4 integrate(|u_x|^4) - q0 |. 1D only.
double h2_identity_residual(const SphereField& u, double q0);

/// integrate(|u x Laplacian u|^2), the kinetic term |u_t|^2 of the undamped flow.
double kinetic_energy(const SphereField& u);

struct SobolevReport {
  int k = 1;
  double seminorm = 0.0;   ///< (integrate |d^k u|^2)^(1/2), all mixed partials
  double full_norm = 0.0;  ///< (sum_{j<=k} seminorm_j^2)^(1/2), j = 0 is the L2 norm
  std::optional<double> surrogate;  ///< ||u||_L2 + ||Laplacian u||_{H^(k-2)}, k >= 2
  std::optional<double> ratio;      ///< full_norm / surrogate
};

/// Discrete Sobolev seminorm via repeated mirrored differencing, k in {1,2,3}.
SobolevReport sobolev_seminorm(const SphereField& u, int k);

/// integrate(|d/dx_a (u x Laplacian u)|^2) summed over axes: the |u_tx|^2 term
/// of the undamped flow. Faces use one-sided differences. Monitored only; no
/// bound is asserted on it.
double kinetic_gradient_energy(const SphereField& u);

/// -2 eps integrate(|tau(u)|^2), the predicted energy derivative. Rejects eps = 0.
double eps_dissipation_rate(const SphereField& u, double eps);

/// max over boundary nodes and components of the 2nd-order one-sided normal derivative.
double boundary_flux_max(const VectorField& u);

/// |current - initial| / max(|initial|, 1e-12)
double relative_drift(double initial, double current);

struct MonitorOptions {
  double eps = 0.0;
  std::optional<double> q0;  ///< reference Q for the H^2 identity (1D, eps = 0)
  bool sobolev = true;
};

InvariantRecord compute_record(const SphereField& u, double t, const MonitorOptions& options);

}  // namespace smflow
