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

#include "smflow/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smflow {

double sphere_violation(const VectorField& u) {
  double worst = 0.0;
  for (const Vec3& v : u.values()) worst = std::max(worst, std::fabs(norm(v) - 1.0));
  return worst;
}

double tangency_violation(const VectorField& u, const VectorField& x) {
  double worst = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) worst = std::max(worst, std::fabs(dot(u[p], x[p])));
  return worst;
}

Vec3 project_tangent(const Vec3& u, const Vec3& v, double sphere_tol) {
  const double dev = std::fabs(norm(u) - 1.0);
  if (!(dev <= sphere_tol)) {
    std::ostringstream msg;
    msg << "project_tangent: base point off the sphere (| |u|-1 | = " << dev << " > " << sphere_tol << ")";
    throw ConstraintViolation(msg.str());
  }
  return v - dot(v, u) * u;
}

VectorField project_tangent(const SphereField& u, const VectorField& v, double sphere_tol) {
  VectorField out(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = project_tangent(u[p], v[p], sphere_tol);
  return out;
}

void renormalize(VectorField& u) {
  for (Vec3& v : u.values()) v = v / norm(v);
}

ScalarField gradient_energy_density(const VectorField& u) {
  ScalarField out(u.grid());
  for (const VectorField& d : gradient_neumann(u))
    for (std::size_t p = 0; p < u.size(); ++p) out[p] += norm2(d[p]);
  return out;
}

TangentField tension_field(const SphereField& u, double sphere_tol) {
  const VectorField lap = laplacian_neumann(u);
  const ScalarField g = gradient_energy_density(u);
  VectorField out(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p)
    out[p] = project_tangent(u[p], lap[p] + g[p] * u[p], sphere_tol);
  return out;
}

TangentField schrodinger_rhs(const SphereField& u) {
  const VectorField lap = laplacian_neumann(u);
  VectorField out(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = cross(u[p], lap[p]);
  return out;
}

namespace {
void require_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
}
}  // namespace

TangentField llg_rhs(const SphereField& u, double eps, double sphere_tol) {
  require_eps(eps);
  VectorField out = schrodinger_rhs(u);
  if (eps == 0.0) return out;
  const VectorField tau = tension_field(u, sphere_tol);
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = eps * tau[p] + out[p];
  return out;
}

VectorField extrinsic_flow_rhs(const VectorField& u, double eps) {
  const VectorField lap = laplacian_neumann(u);
  VectorField out(u.grid());
  if (eps == 0.0) {
    for (std::size_t p = 0; p < u.size(); ++p) out[p] = cross(u[p], lap[p]);
    return out;
  }
  const ScalarField g = gradient_energy_density(u);
  for (std::size_t p = 0; p < u.size(); ++p)
    out[p] = eps * (lap[p] + g[p] * u[p]) + cross(u[p], lap[p]);
  return out;
}

TangentField covariant_derivative(const SphereField& u, const TangentField& x, int axis,
                                  const GeometryTolerances& tol) {
  const double off = tangency_violation(u, x);
  if (!(off <= tol.tangency_tol)) {
    std::ostringstream msg;
    msg << "covariant_derivative: field is not tangent (max |<X,u>| = " << off << " > "
        << tol.tangency_tol << ")";
    throw ConstraintViolation(msg.str());
  }
  const VectorField dx = first_difference(x, axis, EdgeRule::OneSided);
  return project_tangent(u, dx, tol.sphere_tol);
}

}  // namespace smflow
