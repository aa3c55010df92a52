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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smflow/invariants.hpp"

namespace smflow {
namespace {

using testing::CosineProfile;
using testing::kPi;

TEST(DirichletEnergy, CosineProfileClosedForm) {
  for (double alpha : {0.5, 1.0}) {
    const CosineProfile prof{alpha};
    std::vector<double> errs;
    for (int n : {129, 257}) {
      const auto u = prof.sample(BoxGrid(1, n));
      errs.push_back(std::fabs(dirichlet_energy(u) - prof.energy()));
      EXPECT_NEAR(dirichlet_energy_sbp(u), prof.energy(), 1e-3 * prof.energy());
    }
    EXPECT_LE(errs[1], 1e-3 * prof.energy());
    EXPECT_GE(testing::observed(errs[0], errs[1]), 1.8);
  }
}

TEST(DirichletEnergy, ExtendsConstantlyAlongExtraAxes) {
  // a profile in x_0 only has the same energy on [0,1]^2
  const CosineProfile prof{0.5};
  const auto u1 = prof.sample(BoxGrid(1, 65));
  const auto u2 = prof.sample(BoxGrid(2, 65));
  EXPECT_NEAR(dirichlet_energy(u2), dirichlet_energy(u1), 1e-13);
  EXPECT_EQ(dirichlet_energy(VectorField(BoxGrid(3, 5), Vec3{0, 1, 0})), 0.0);
}

TEST(DirichletEnergy, SbpMatchesEdgeSum) {
  std::mt19937_64 rng(29);
  const auto u = testing::random_sphere_field(BoxGrid(1, 20), rng);
  const double h = u.grid().spacing(0);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) sum += norm2(u[i + 1] - u[i]) / h;
  EXPECT_NEAR(dirichlet_energy_sbp(u), sum, 1e-12 * sum);
}

TEST(QInvariant, RoutesAgree) {
  for (double alpha : {0.3, 0.9}) {
    const auto u = CosineProfile{alpha}.sample(BoxGrid(1, 257));
    const double q = q_invariant(u);
    const double scale = std::fabs(q) + 1.0;
    EXPECT_NEAR(q_invariant_tension_route(u), q, 1e-3 * scale);
    EXPECT_NEAR(q_invariant_identity_route(u), q, 1e-3 * scale);
  }
}

TEST(QInvariant, ClosedFormForCosineProfile) {
  // |u x u_xx|^2 = theta''^2 and |u_x|^4 = theta'^4 for the planar profile
  const double a = 0.5;
  const double exact = a * a * std::pow(kPi, 4) / 2.0 - 0.25 * 3.0 * std::pow(a * kPi, 4) / 8.0;
  const auto u = CosineProfile{a}.sample(BoxGrid(1, 513));
  EXPECT_NEAR(q_invariant(u), exact, 1e-3 * std::fabs(exact));
}

TEST(QInvariant, RejectsHigherDimensionsAndDamping) {
  const auto u2 = CosineProfile{}.sample(BoxGrid(2, 9));
  EXPECT_THROW(q_invariant(u2), InvalidArgument);
  const auto u1 = CosineProfile{}.sample(BoxGrid(1, 9));
  EXPECT_THROW(q_invariant(u1, 0.1), InvalidArgument);
  EXPECT_THROW(h2_identity_residual(u2, 0.0), InvalidArgument);
}

TEST(H2Identity, ResidualVanishesAtInitialTime) {
  std::vector<double> res;
  for (int n : {129, 257}) {
    const auto u = CosineProfile{0.7}.sample(BoxGrid(1, n));
    res.push_back(h2_identity_residual(u, q_invariant(u)));
  }
  EXPECT_LE(res[1], 1e-2);
  EXPECT_GE(testing::observed(res[0], res[1]), 1.5);
}

TEST(Sobolev, SeminormsOfCosineProfile) {
  const CosineProfile prof{0.5};
  const auto u = prof.sample(BoxGrid(1, 513));
  const auto s1 = sobolev_seminorm(u, 1);
  EXPECT_NEAR(s1.seminorm * s1.seminorm, prof.energy(), 1e-3 * prof.energy());
  EXPECT_NEAR(s1.full_norm * s1.full_norm, 1.0 + prof.energy(), 1e-3);
  EXPECT_FALSE(s1.surrogate.has_value());
  for (int k : {2, 3}) {
    const auto s = sobolev_seminorm(u, k);
    ASSERT_TRUE(s.ratio.has_value());
    EXPECT_GE(*s.ratio, 0.1);
    EXPECT_LE(*s.ratio, 10.0);
    EXPECT_GT(s.seminorm, 0.0);
  }
  EXPECT_THROW(sobolev_seminorm(u, 4), InvalidArgument);
  EXPECT_THROW(sobolev_seminorm(u, 0), InvalidArgument);
}

TEST(Sobolev, ConstantFieldHasZeroSeminorms) {
  const VectorField u(BoxGrid(2, 9), Vec3{0, 0, 1});
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(sobolev_seminorm(u, k).seminorm, 0.0);
}

TEST(Dissipation, RateIsMinusTwoEpsTensionSquared) {
  const CosineProfile prof{0.5};
  const auto u = prof.sample(BoxGrid(1, 257));
  // integral theta''^2 = alpha^2 pi^4 / 2
  const double tau2 = prof.alpha * prof.alpha * std::pow(kPi, 4) / 2.0;
  EXPECT_NEAR(eps_dissipation_rate(u, 0.1), -0.2 * tau2, 1e-3 * tau2);
  EXPECT_THROW(eps_dissipation_rate(u, 0.0), InvalidArgument);
  EXPECT_EQ(eps_dissipation_rate(VectorField(BoxGrid(1, 9), Vec3{1, 0, 0}), 0.5), 0.0);
}

TEST(BoundaryFlux, ZeroForNeumannDataAndLargeOtherwise) {
  EXPECT_LE(boundary_flux_max(CosineProfile{0.5}.sample(BoxGrid(1, 257))), 1e-3);
  EXPECT_NEAR(boundary_flux_max(testing::Geodesic{1.0}.sample(BoxGrid(1, 257))), 1.0, 1e-3);
}

TEST(KineticGradient, ClosedFormForCosineProfile) {
  // u_t = theta'' e_y, so |u_tx|^2 = theta'''^2 and the integral is alpha^2 pi^6 / 2
  const double a = 0.5;
  const double exact = a * a * std::pow(kPi, 6) / 2.0;
  const auto u = CosineProfile{a}.sample(BoxGrid(1, 513));
  EXPECT_NEAR(kinetic_gradient_energy(u), exact, 1e-3 * exact);
  EXPECT_EQ(kinetic_gradient_energy(VectorField(BoxGrid(2, 9), Vec3{0, 0, 1})), 0.0);
}

TEST(RelativeDrift, Definition) {
  EXPECT_DOUBLE_EQ(relative_drift(2.0, 2.5), 0.25);
  EXPECT_DOUBLE_EQ(relative_drift(-4.0, -3.0), 0.25);
  EXPECT_DOUBLE_EQ(relative_drift(0.0, 1e-13), 0.1);
}

TEST(ComputeRecord, FieldsFollowApplicability) {
  const auto u1 = CosineProfile{0.5}.sample(BoxGrid(1, 65));
  MonitorOptions undamped;
  undamped.q0 = q_invariant(u1);
  const auto r = compute_record(u1, 0.5, undamped);
  EXPECT_EQ(r.t, 0.5);
  EXPECT_TRUE(r.q_value.has_value());
  EXPECT_TRUE(r.h2_identity_residual.has_value());
  EXPECT_FALSE(r.eps_dissipation_rate.has_value());
  for (const auto& s : r.sobolev) EXPECT_TRUE(s.has_value());

  MonitorOptions damped;
  damped.eps = 0.1;
  damped.sobolev = false;
  const auto d = compute_record(CosineProfile{0.5}.sample(BoxGrid(2, 9)), 0.0, damped);
  EXPECT_FALSE(d.q_value.has_value());
  EXPECT_FALSE(d.h2_identity_residual.has_value());
  EXPECT_TRUE(d.eps_dissipation_rate.has_value());
  for (const auto& s : d.sobolev) EXPECT_FALSE(s.has_value());
}

}  // namespace
}  // namespace smflow
