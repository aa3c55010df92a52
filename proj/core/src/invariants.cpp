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

#include "smflow/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace smflow {

namespace {

void require_1d(const BoxGrid& g, const char* what) {
  if (g.dims() != 1) throw InvalidArgument(std::string(what) + " is defined on 1D grids only");
}

double quartic_gradient_term(const SphereField& u) {
  const VectorField ux = gradient_neumann(u)[0];
  ScalarField f(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) {
    const double s = norm2(ux[p]);
    f[p] = s * s;
  }
  return integrate(f);
}

// Visits every multi-index of total order k in `dims` dimensions together with
// its multinomial multiplicity k!/(a0! a1! a2!).
void for_each_multi_index(int dims, int k, const std::function<void(std::array<int, 3>, double)>& fn) {
  auto fact = [](int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  for (int a0 = 0; a0 <= k; ++a0) {
    for (int a1 = 0; a1 <= (dims > 1 ? k - a0 : 0); ++a1) {
      const int a2 = k - a0 - a1;
      if (dims < 3 && a2 != 0) continue;
      if (dims < 2 && a1 != 0) continue;
      fn({a0, a1, a2}, fact(k) / (fact(a0) * fact(a1) * fact(a2)));
    }
  }
}

template <class T>
Field<T> mixed_partial(const Field<T>& f, const std::array<int, 3>& alpha) {
  Field<T> out = f;
  for (int a = 0; a < f.grid().dims(); ++a)
    if (alpha[static_cast<std::size_t>(a)] > 0) out = partial_derivative(out, a, alpha[static_cast<std::size_t>(a)]);
  return out;
}

double seminorm_squared(const VectorField& u, int k) {
  if (k == 0) return integrate_norm2(u);
  double total = 0.0;
  for_each_multi_index(u.grid().dims(), k, [&](std::array<int, 3> alpha, double mult) {
    total += mult * integrate_norm2(mixed_partial(u, alpha));
  });
  return total;
}

}  // namespace

double dirichlet_energy(const SphereField& u) { return integrate(gradient_energy_density(u)); }

double dirichlet_energy_sbp(const SphereField& u) {
  return -integrate(pointwise_dot(u, laplacian_neumann(u)));
}

double kinetic_energy(const SphereField& u) { return integrate_norm2(schrodinger_rhs(u)); }

double kinetic_gradient_energy(const SphereField& u) {
  const VectorField ut = schrodinger_rhs(u);
  double sum = 0.0;
  for (int a = 0; a < u.grid().dims(); ++a) sum += integrate_norm2(first_difference(ut, a, EdgeRule::OneSided));
  return sum;
}

double q_invariant(const SphereField& u, double eps) {
  require_1d(u.grid(), "q_invariant");
  if (eps != 0.0) throw InvalidArgument("q_invariant is conserved only for eps = 0");
  return kinetic_energy(u) - 0.25 * quartic_gradient_term(u);
}

double q_invariant_tension_route(const SphereField& u) {
  require_1d(u.grid(), "q_invariant");
  return integrate_norm2(tension_field(u)) - 0.25 * quartic_gradient_term(u);
}

double q_invariant_identity_route(const SphereField& u) {
  require_1d(u.grid(), "q_invariant");
  const VectorField lap = laplacian_neumann(u);
  ScalarField f(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) {
    const double c = dot(u[p], lap[p]);
    f[p] = norm2(lap[p]) - c * c;
  }
  return integrate(f) - 0.25 * quartic_gradient_term(u);
}

double h2_identity_residual(const SphereField& u, double q0) {
  require_1d(u.grid(), "h2_identity_residual");
  const double uxx = integrate_norm2(laplacian_neumann(u));
  return std::fabs(uxx - 1.25 * quartic_gradient_term(u) - q0);
}

SobolevReport sobolev_seminorm(const SphereField& u, int k) {
  if (k < 1 || k > 3) throw InvalidArgument("sobolev_seminorm supports k in {1,2,3}");
  SobolevReport r;
  r.k = k;
  double full = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double s = seminorm_squared(u, j);
    full += s;
    if (j == k) r.seminorm = std::sqrt(s);
  }
  r.full_norm = std::sqrt(full);
  if (k >= 2) {
    const VectorField lap = laplacian_neumann(u);
    double lap_norm = 0.0;
    for (int j = 0; j <= k - 2; ++j) lap_norm += seminorm_squared(lap, j);
    r.surrogate = std::sqrt(integrate_norm2(u)) + std::sqrt(lap_norm);
    r.ratio = r.full_norm / *r.surrogate;
  }
  return r;
}

double eps_dissipation_rate(const SphereField& u, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps_dissipation_rate requires eps in (0,1]");
  return -2.0 * eps * integrate_norm2(tension_field(u));
}

double boundary_flux_max(const VectorField& u) {
  double worst = 0.0;
  for (const auto& s : boundary_normal_derivative(u, 2)) worst = std::max(worst, max_abs(s.value));
  return worst;
}

double relative_drift(double initial, double current) {
  return std::fabs(current - initial) / std::max(std::fabs(initial), 1e-12);
}

InvariantRecord compute_record(const SphereField& u, double t, const MonitorOptions& options) {
  InvariantRecord r;
  r.t = t;
  r.sphere_violation = sphere_violation(u);
  r.dirichlet_energy = dirichlet_energy(u);
  if (u.grid().dims() == 1 && options.eps == 0.0) {
    r.q_value = q_invariant(u);
    r.h2_identity_residual = h2_identity_residual(u, options.q0.value_or(*r.q_value));
  }
  if (options.sobolev)
    for (int k = 1; k <= 3; ++k) r.sobolev[static_cast<std::size_t>(k - 1)] = sobolev_seminorm(u, k).seminorm;
  r.boundary_flux_max = boundary_flux_max(u);
  if (options.eps > 0.0) r.eps_dissipation_rate = eps_dissipation_rate(u, options.eps);
  return r;
}

}  // namespace smflow
