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

#include "smflow/compatibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace smflow {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::CC0:
      return "CC0";
    case Condition::CC1Intrinsic:
      return "CC1_intrinsic";
    case Condition::CCStrong:
      return "CC_strong";
    case Condition::CCTilde:
      return "CC_tilde";
  }
  return "?";
}

double CompatReport::max_raw(int level) const {
  double worst = 0.0;
  for (const auto& r : residuals)
    if (r.level == level) worst = std::max(worst, r.raw);
  return worst;
}

namespace {

class ReportBuilder {
 public:
  ReportBuilder(Condition c, int order, const BoxGrid& grid, const CompatOptions& opt) : h_(grid.max_spacing()) {
    report_.condition = c;
    report_.order = order;
    report_.tolerance_used = opt.c0 * h_ * h_;
  }

  void add(int level, std::string quantity, int axis, Side side, std::size_t node, double raw) {
    CompatResidual r{level, std::move(quantity), axis, side, node, raw, raw * std::pow(h_, level - 1)};
    if (!(r.scaled <= report_.tolerance_used) &&
        (!report_.first_failing_level || level < *report_.first_failing_level))
      report_.first_failing_level = level;
    report_.max_scaled_residual = std::max(report_.max_scaled_residual, r.scaled);
    if (std::isnan(r.scaled)) report_.max_scaled_residual = r.scaled;
    report_.residuals.push_back(std::move(r));
  }

  void note(std::string n) { report_.note = std::move(n); }

  CompatReport finish() {
    report_.pass = report_.max_scaled_residual <= report_.tolerance_used;
    return std::move(report_);
  }

 private:
  double h_;
  CompatReport report_;
};

void add_cc0_residuals(ReportBuilder& b, const SphereField& u0, const CompatOptions& opt, bool project) {
  for (const auto& s : boundary_normal_derivative(u0, opt.stencil_accuracy)) {
    const Vec3 v = project ? project_tangent(u0[s.node], s.value, opt.geometry.sphere_tol) : s.value;
    b.add(1, project ? "P(u0) du0/dnu" : "du0/dnu", s.axis, s.side, s.node, max_abs(v));
  }
}

void require_order(int k) {
  if (k < 0) throw InvalidArgument("compatibility order must be nonnegative");
  if (2 * k + 1 > kDerivativeCap)
    throw InvalidArgument("compatibility order k = " + std::to_string(k) + " needs derivatives beyond the cap of " +
                          std::to_string(kDerivativeCap));
}

std::string multi_index_label(const std::array<int, 3>& alpha, int dims) {
  std::ostringstream s;
  s << "d^(";
  for (int a = 0; a < dims; ++a) s << (a ? "," : "") << alpha[static_cast<std::size_t>(a)];
  s << ") u0";
  return s.str();
}

}  // namespace

CompatReport check_cc0(const SphereField& u0, const CompatOptions& options) {
  ReportBuilder b(Condition::CC0, 0, u0.grid(), options);
  add_cc0_residuals(b, u0, options, false);
  return b.finish();
}

CompatReport check_cc1_intrinsic(const SphereField& u0, const CompatOptions& options) {
  const CompatReport cc0 = check_cc0(u0, options);
  ReportBuilder b(Condition::CC1Intrinsic, 1, u0.grid(), options);
  add_cc0_residuals(b, u0, options, true);
  if (!cc0.pass) {
    b.note("CC0 failed; higher-order residuals not evaluated");
    CompatReport r = b.finish();
    r.pass = false;
    return r;
  }
  const TangentField tau = tension_field(u0, options.geometry.sphere_tol);
  for (const auto& s : boundary_normal_derivative(tau, options.stencil_accuracy)) {
    const Vec3 v = project_tangent(u0[s.node], s.value, options.geometry.sphere_tol);
    b.add(3, "P(u0) d tau(u0)/dnu", s.axis, s.side, s.node, max_abs(v));
  }
  return b.finish();
}

CompatReport check_cc_strong(const SphereField& u0, int k, const CompatOptions& options) {
  require_order(k);
  const BoxGrid& g = u0.grid();
  const int dims = g.dims();
  const CompatReport cc0 = check_cc0(u0, options);
  ReportBuilder b(Condition::CCStrong, k, g, options);
  if (!cc0.pass) {
    for (const auto& r : cc0.residuals) b.add(r.level, r.quantity, r.axis, r.side, r.node, r.raw);
    b.note("CC0 failed; higher-order residuals not evaluated");
    return b.finish();
  }
  const int max_order = 2 * k + 1;
  for (int normal = 0; normal < dims; ++normal) {
    for (int total = 1; total <= max_order; ++total) {
      // enumerate alpha with |alpha| = total and odd alpha[normal]
      for (int an = 1; an <= total; an += 2) {
        const int rest = total - an;
        std::vector<std::array<int, 3>> alphas;
        if (dims == 1) {
          if (rest == 0) alphas.push_back({an, 0, 0});
        } else {
          int t1 = -1, t2 = -1;
          for (int a = 0; a < dims; ++a)
            if (a != normal) (t1 < 0 ? t1 : t2) = a;
          for (int x = 0; x <= rest; ++x) {
            const int y = rest - x;
            if (dims == 2 && y != 0) continue;
            std::array<int, 3> alpha{0, 0, 0};
            alpha[static_cast<std::size_t>(normal)] = an;
            alpha[static_cast<std::size_t>(t1)] = x;
            if (t2 >= 0) alpha[static_cast<std::size_t>(t2)] = y;
            alphas.push_back(alpha);
          }
        }
        for (const auto& alpha : alphas) {
          VectorField tangential = u0;
          for (int a = 0; a < dims; ++a)
            if (a != normal && alpha[static_cast<std::size_t>(a)] > 0)
              tangential = partial_derivative(tangential, a, alpha[static_cast<std::size_t>(a)]);
          const std::string label = multi_index_label(alpha, dims);
          for (Side side : {Side::Low, Side::High})
            for (const auto& s : boundary_derivative(tangential, normal, side, an, options.stencil_accuracy))
              b.add(total, label, s.axis, s.side, s.node, max_abs(s.value));
        }
      }
    }
  }
  return b.finish();
}

CompatReport check_cc_tilde(const SphereField& u0, int k, const CompatOptions& options) {
  require_order(k);
  const BoxGrid& g = u0.grid();
  if (g.dims() != 1) throw InvalidArgument("check_cc_tilde is defined on 1D grids only");
  const int top = 2 * k + 1;
  const int q = options.extrapolation_degree;
  const int n = g.nodes(0);
  if (top + q >= n)
    throw GridError("extrapolation stencil for the covariant ladder does not fit " + std::to_string(n) + " nodes");

  std::vector<double> offsets(static_cast<std::size_t>(q + 1));
  ReportBuilder b(Condition::CCTilde, k, g, options);

  // ladder[m-1] = m-th covariant derivative; nodes i with m <= i <= n-1-m are
  // built from central differences only.
  TangentField level = project_tangent(u0, first_difference(u0, 0, EdgeRule::OneSided), options.geometry.sphere_tol);
  for (int m = 1; m <= top; ++m) {
    if (m > 1) level = covariant_derivative(u0, level, 0, options.geometry);
    if (m % 2 == 0) continue;
    for (int j = 0; j <= q; ++j) offsets[static_cast<std::size_t>(j)] = m + j;
    const auto w = fornberg_weights(0.0, offsets, 0)[0];
    Vec3 left{}, right{};
    for (int j = 0; j <= q; ++j) {
      left += w[static_cast<std::size_t>(j)] * level[static_cast<std::size_t>(m + j)];
      right += w[static_cast<std::size_t>(j)] * level[static_cast<std::size_t>(n - 1 - m - j)];
    }
    const std::string label = "covariant d^" + std::to_string(m) + " u0";
    b.add(m, label, 0, Side::Low, 0, max_abs(left));
    b.add(m, label, 0, Side::High, static_cast<std::size_t>(n - 1), max_abs(right));
  }
  return b.finish();
}

ImplicationReport implication_check(const SphereField& u0, int k, const CompatOptions& options) {
  ImplicationReport r{check_cc_strong(u0, k, options), check_cc_tilde(u0, k, options), true};
  r.holds = !r.strong.pass || r.tilde.pass;
  return r;
}

TangentField compute_v1(const SphereField& u0, double eps) { return llg_rhs(u0, eps); }

VectorField compute_v2(const SphereField& u0, double eps) {
  const VectorField v1 = compute_v1(u0, eps);
  const VectorField lap_u = laplacian_neumann(u0);
  const VectorField lap_v = laplacian_neumann(v1);
  VectorField out(u0.grid());
  for (std::size_t p = 0; p < u0.size(); ++p) out[p] = cross(v1[p], lap_u[p]) + cross(u0[p], lap_v[p]);
  if (eps == 0.0) return out;
  const auto grad_u = gradient_neumann(u0);
  const auto grad_v = gradient_neumann(v1);
  for (std::size_t p = 0; p < u0.size(); ++p) {
    double mixed = 0.0;
    double g = 0.0;
    for (std::size_t a = 0; a < grad_u.size(); ++a) {
      mixed += dot(grad_v[a][p], grad_u[a][p]);
      g += norm2(grad_u[a][p]);
    }
    out[p] += eps * (lap_v[p] + 2.0 * mixed * u0[p] + g * v1[p]);
  }
  return out;
}

const char* to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::ConstantNearBoundary:
      return "constant_near_boundary";
    case InitialFamily::MirrorSymmetricProfile:
      return "mirror_symmetric_profile";
    case InitialFamily::Geodesic:
      return "geodesic";
  }
  return "?";
}

std::optional<InitialFamily> parse_initial_family(const std::string& name) {
  for (auto f : {InitialFamily::ConstantNearBoundary, InitialFamily::MirrorSymmetricProfile, InitialFamily::Geodesic})
    if (name == to_string(f)) return f;
  return std::nullopt;
}

namespace {

// Smooth bump on [0,1], identically zero within `width` of either end, 1 at the centre.
double bump(double t, double width) {
  const double y = (t - width) / (1.0 - 2.0 * width);
  if (y <= 0.0 || y >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (4.0 * y * (1.0 - y)));
}

}  // namespace

SphereField generate_initial_data(const InitialDataSpec& spec, const BoxGrid& grid) {
  using std::numbers::pi;
  switch (spec.family) {
    case InitialFamily::MirrorSymmetricProfile: {
      if (spec.amplitudes.empty()) throw InvalidArgument("mirror_symmetric_profile needs at least one amplitude");
      for (double a : spec.amplitudes)
        if (!std::isfinite(a)) throw InvalidArgument("amplitudes must be finite");
      return VectorField::sample(grid, [&](const std::array<double, 3>& x) {
        double theta = 0.0;
        for (std::size_t n = 0; n < spec.amplitudes.size(); ++n)
          theta += spec.amplitudes[n] * std::cos(static_cast<double>(n + 1) * pi * x[0]);
        return Vec3{std::sin(theta), 0.0, std::cos(theta)};
      });
    }
    case InitialFamily::ConstantNearBoundary: {
      if (!(spec.blend_width > 0.0 && spec.blend_width < 0.5))
        throw InvalidArgument("blend_width must lie in (0, 0.5)");
      if (!std::isfinite(spec.amplitude)) throw InvalidArgument("amplitude must be finite");
      if (spec.mode_count < 0) throw InvalidArgument("mode_count must be >= 0");
      return VectorField::sample(grid, [&](const std::array<double, 3>& x) {
        double b = 1.0;
        for (int a = 0; a < grid.dims(); ++a) b *= bump(x[static_cast<std::size_t>(a)], spec.blend_width);
        const double phi = spec.amplitude * b;
        const double psi = spec.mode_count * pi * x[0];
        return Vec3{std::sin(phi) * std::cos(psi), std::sin(phi) * std::sin(psi), std::cos(phi)};
      });
    }
    case InitialFamily::Geodesic: {
      if (!std::isfinite(spec.omega)) throw InvalidArgument("omega must be finite");
      return VectorField::sample(grid, [&](const std::array<double, 3>& x) {
        return Vec3{std::cos(spec.omega * x[0]), std::sin(spec.omega * x[0]), 0.0};
      });
    }
  }
  throw InvalidArgument("unknown initial-data family");
}

InitialDataSpec random_admissible_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InitialDataSpec spec;
  if (unit(rng) < 0.5) {
    spec.family = InitialFamily::MirrorSymmetricProfile;
    const int modes = 1 + static_cast<int>(unit(rng) * 2.0);
    spec.amplitudes.assign(static_cast<std::size_t>(modes), 0.0);
    for (int n = 0; n < modes; ++n) spec.amplitudes[static_cast<std::size_t>(n)] = (2.0 * unit(rng) - 1.0) * 0.6 / (n + 1);
  } else {
    spec.family = InitialFamily::ConstantNearBoundary;
    spec.amplitude = 0.2 + 1.3 * unit(rng);
    spec.blend_width = 0.1 + 0.15 * unit(rng);
    spec.mode_count = static_cast<int>(unit(rng) * 3.0);
  }
  return spec;
}

}  // namespace smflow
