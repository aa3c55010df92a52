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

#include "smflow/grid.hpp"
#include "smflow/vec3.hpp"

namespace smflow {

/// Map from the grid to S^2. The unit-norm invariant is checked at operation
/// boundaries rather than carried in the type.
using SphereField = VectorField;
/// Section of u*TS^2: values tangent to a base SphereField.
using TangentField = VectorField;

struct GeometryTolerances {
  double sphere_tol = 1e-9;
  double tangency_tol = 1e-9;
};

/// max over nodes of | |u| - 1 |
double sphere_violation(const VectorField& u);
/// max over nodes of |<X, u>|
double tangency_violation(const VectorField& u, const VectorField& x);

/// v - <v,u> u. Throws ConstraintViolation when u is off the sphere.
Vec3 project_tangent(const Vec3& u, const Vec3& v, double sphere_tol = GeometryTolerances{}.sphere_tol);

/// Nodewise tangent projection of a whole field.
VectorField project_tangent(const SphereField& u, const VectorField& v,
                            double sphere_tol = GeometryTolerances{}.sphere_tol);

/// u / |u| at every node.
void renormalize(VectorField& u);

/// |grad u|^2 per node, with the mirror gradient.
ScalarField gradient_energy_density(const VectorField& u);

/// tau(u) = Laplacian(u) + |grad u|^2 u, followed by the tangent projection.
TangentField tension_field(const SphereField& u, double sphere_tol = GeometryTolerances{}.sphere_tol);

/// u x Laplacian(u), tangent to u by construction.
TangentField schrodinger_rhs(const SphereField& u);

/// eps tau(u) + u x Laplacian(u). Throws InvalidArgument for eps outside [0,1].
TangentField llg_rhs(const SphereField& u, double eps,
                     double sphere_tol = GeometryTolerances{}.sphere_tol);

/// eps (Laplacian(u) + |grad u|^2 u) + u x Laplacian(u) for an arbitrary
/// (not necessarily unit) field. Used by integrators for stage and midpoint
/// values, which leave the sphere between constraint restorations.
VectorField extrinsic_flow_rhs(const VectorField& u, double eps);

/// Pull-back covariant derivative P(u) dX/dx_axis.
///
/// Interior nodes use central differences; boundary nodes use second-order
/// one-sided differences (X generally has odd parity at the faces, so a mirror
/// ghost would be wrong). Throws ConstraintViolation if X is not tangent.
TangentField covariant_derivative(const SphereField& u, const TangentField& x, int axis = 0,
                                  const GeometryTolerances& tol = {});

}  // namespace smflow
