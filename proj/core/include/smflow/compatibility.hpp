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
#include <random>
#include <string>
#include <vector>

#include "smflow/sphere_geometry.hpp"

namespace smflow {

enum class Condition { CC0, CC1Intrinsic, CCStrong, CCTilde };

const char* to_string(Condition c);

/// One boundary residual. `level` is the derivative order of the tested
/// quantity; `scaled` = raw * h^(level-1), which is what gets compared against
/// the report's tolerance c0 * h^2.
struct CompatResidual {
  int level = 1;
  std::string quantity;
  int axis = 0;
  Side side = Side::Low;
  std::size_t node = 0;
  double raw = 0.0;
  double scaled = 0.0;
};

struct CompatReport {
  Condition condition = Condition::CC0;
  int order = 0;
  std::vector<CompatResidual> residuals;
  double tolerance_used = 0.0;
  double max_scaled_residual = 0.0;
  bool pass = false;
  std::optional<int> first_failing_level;
  std::string note;

  /// Largest raw residual among entries of the given level (0 when absent).
  double max_raw(int level) const;
};

struct CompatOptions {
  double c0 = 10.0;
  int stencil_accuracy = 2;      ///< one-sided boundary stencils
  int extrapolation_degree = 2;  ///< endpoint extrapolation of the 1D ladder
  GeometryTolerances geometry{};
};

/// du0/dnu = 0 on every face.
CompatReport check_cc0(const SphereField& u0, const CompatOptions& options = {});

/// Order-1 intrinsic condition: P(u0) du0/dnu = 0 and P(u0) d tau(u0)/dnu = 0.
/// No eps argument: the condition does not depend on the damping.
CompatReport check_cc1_intrinsic(const SphereField& u0, const CompatOptions& options = {});

/// Strong condition of order k (k <= 2): on each face normal to axis a, every
/// partial derivative d^alpha u0 of total order <= 2k+1 with odd alpha_a
/// vanishes. Normal parts use one-sided stencils, tangential parts mirrored
/// central differences.
CompatReport check_cc_strong(const SphereField& u0, int k, const CompatOptions& options = {});

/// 1D intrinsic ladder: covariant derivatives of odd order 2j+1 <= 2k+1 vanish at
/// both endpoints. The ladder is built in the interior and extrapolated.
CompatReport check_cc_tilde(const SphereField& u0, int k, const CompatOptions& options = {});

struct ImplicationReport {
  CompatReport strong;
  CompatReport tilde;
  bool holds = true;  ///< !strong.pass || tilde.pass
};

ImplicationReport implication_check(const SphereField& u0, int k, const CompatOptions& options = {});

/// V1 = eps tau(u0) + u0 x Laplacian(u0).
TangentField compute_v1(const SphereField& u0, double eps);

/// V2 = eps(Lap V1 + 2<grad V1, grad u0> u0 + |grad u0|^2 V1) + V1 x Lap u0 + u0 x Lap V1.
VectorField compute_v2(const SphereField& u0, double eps);

enum class InitialFamily { ConstantNearBoundary, MirrorSymmetricProfile, Geodesic };

const char* to_string(InitialFamily f);
std::optional<InitialFamily> parse_initial_family(const std::string& name);

struct InitialDataSpec {
  InitialFamily family = InitialFamily::MirrorSymmetricProfile;
  /// Mirror-symmetric profile: theta(x) = sum_n amplitudes[n-1] cos(n pi x_0).
  std::vector<double> amplitudes{0.5};
  /// Constant-near-boundary: rotation angle amplitude * bump(x).
  double amplitude = 1.0;
  double blend_width = 0.2;
  /// Constant-near-boundary: the rotation axis turns by mode_count * pi across axis 0.
  int mode_count = 0;
  /// Geodesic: u(x) = (cos omega x_0, sin omega x_0, 0).
  double omega = 1.0;

  friend bool operator==(const InitialDataSpec&, const InitialDataSpec&) = default;
};

/// Builds an exactly unit-norm field. Throws InvalidArgument on bad parameters.
SphereField generate_initial_data(const InitialDataSpec& spec, const BoxGrid& grid);

/// Draws a random member of one of the two admissible families.
InitialDataSpec random_admissible_spec(std::mt19937_64& rng);

}  // namespace smflow
