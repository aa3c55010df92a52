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

#include "smflow/integrators.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace smflow {

namespace {

struct Mat3 {
  std::array<double, 9> a{};

  static Mat3 identity(double s = 1.0) {
    Mat3 m;
    m.a[0] = m.a[4] = m.a[8] = s;
    return m;
  }
  // [v]_x, the matrix of w -> v x w
  static Mat3 cross_matrix(const Vec3& v) {
    Mat3 m;
    m.a = {0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0};
    return m;
  }
  static Mat3 outer(const Vec3& u, const Vec3& v) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = u[i] * v[j];
    return m;
  }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

  Mat3& operator+=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  friend Mat3 operator*(double s, Mat3 m) {
    for (double& x : m.a) x *= s;
    return m;
  }
  friend Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
  friend Mat3 operator-(Mat3 x, const Mat3& y) {
    for (std::size_t k = 0; k < 9; ++k) x.a[k] -= y.a[k];
    return x;
  }
  friend Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
    return r;
  }
  friend Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z, m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
  }

  Mat3 inverse() const {
    const Mat3& m = *this;
    Mat3 r;
    r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double det = m(0, 0) * r(0, 0) + m(0, 1) * r(1, 0) + m(0, 2) * r(2, 0);
    return (1.0 / det) * r;
  }
};

double max_laplacian(const VectorField& u) {
  double worst = 0.0;
  for (const Vec3& v : laplacian_neumann(u).values()) worst = std::max(worst, norm(v));
  return worst;
}

bool all_finite(const VectorField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](const Vec3& v) { return is_finite(v); });
}

// Emits the 3x3 blocks of J = I - (dt/2) F'(m), F(m) = eps(Lap m + |grad m|^2 m) + m x Lap m,
// as (row node, column node, block) triples. Repeated (row, col) pairs must be summed.
template <class Emit>
void emit_midpoint_jacobian(const VectorField& m, double eps, double dt, Emit&& emit) {
  const BoxGrid& g = m.grid();
  const VectorField lap = laplacian_neumann(m);
  const std::vector<VectorField> grad = gradient_neumann(m);
  const double half = 0.5 * dt;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Mat3 mx = Mat3::cross_matrix(m[p]);
    // d/d(delta) of m x Lap(delta) and eps Lap(delta): per-neighbour coefficient c.
    const Mat3 lap_block = mx + Mat3::identity(eps);
    Mat3 diag = Mat3::identity(1.0);
    // delta x Lap(m) = -[Lap m]_x delta
    diag += (-half) * (-1.0 * Mat3::cross_matrix(lap[p]));
    if (eps != 0.0) {
      double gp = 0.0;
      for (const auto& d : grad) gp += norm2(d[p]);
      diag += (-half * eps * gp) * Mat3::identity(1.0);
    }
    for (int a = 0; a < g.dims(); ++a) {
      const std::size_t s = g.stride(a);
      const int n = g.nodes(a);
      const int i = g.axis_index(p, a);
      const double c = 1.0 / (g.spacing(a) * g.spacing(a));
      const std::size_t lo = i == 0 ? p + s : p - s;
      const std::size_t hi = i == n - 1 ? p - s : p + s;
      emit(p, lo, (-half * c) * lap_block);
      emit(p, hi, (-half * c) * lap_block);
      diag += (half * 2.0 * c) * lap_block;
      if (eps != 0.0 && i > 0 && i < n - 1) {
        // 2 eps <grad m, grad delta> m along axis a (central, zero on the faces)
        const Mat3 b = (2.0 * eps * 0.5 / g.spacing(a)) * Mat3::outer(m[p], grad[static_cast<std::size_t>(a)][p]);
        emit(p, p + s, (-half) * b);
        emit(p, p - s, half * b);
      }
    }
    emit(p, p, diag);
  }
}

// Solves the 1D block tridiagonal system J x = rhs in place.
void solve_block_tridiagonal(const VectorField& m, double eps, double dt, std::vector<Vec3>& rhs) {
  const std::size_t n = m.size();
  std::vector<Mat3> lower(n), diag(n), upper(n);
  emit_midpoint_jacobian(m, eps, dt, [&](std::size_t r, std::size_t c, const Mat3& b) {
    if (c == r) diag[r] += b;
    else if (c + 1 == r) lower[r] += b;
    else upper[r] += b;
  });
  std::vector<Mat3> inv(n);
  inv[0] = diag[0].inverse();
  for (std::size_t i = 1; i < n; ++i) {
    const Mat3 w = lower[i] * inv[i - 1];
    diag[i] = diag[i] - w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
    inv[i] = diag[i].inverse();
  }
  rhs[n - 1] = inv[n - 1] * rhs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = inv[i] * (rhs[i] - upper[i] * rhs[i + 1]);
}

void solve_sparse(const VectorField& m, double eps, double dt, std::vector<Vec3>& rhs) {
  const auto n = static_cast<Eigen::Index>(3 * m.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.size() * 9 * static_cast<std::size_t>(1 + 2 * m.grid().dims()) * 2);
  emit_midpoint_jacobian(m, eps, dt, [&](std::size_t r, std::size_t c, const Mat3& b) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (b(i, j) != 0.0)
          triplets.emplace_back(static_cast<Eigen::Index>(3 * r) + i, static_cast<Eigen::Index>(3 * c) + j, b(i, j));
  });
  Eigen::SparseMatrix<double> jac(n, n);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(jac);
  if (lu.info() != Eigen::Success) throw StepFailure(0.0, 0, 0.0, "implicit midpoint: Jacobian factorization failed");
  Eigen::VectorXd b(n);
  for (std::size_t p = 0; p < m.size(); ++p)
    for (int i = 0; i < 3; ++i) b(static_cast<Eigen::Index>(3 * p) + i) = rhs[p][i];
  const Eigen::VectorXd x = lu.solve(b);
  for (std::size_t p = 0; p < m.size(); ++p)
    for (int i = 0; i < 3; ++i) rhs[p][i] = x(static_cast<Eigen::Index>(3 * p) + i);
}

}  // namespace

bool renormalizes(const FlowParams& params) {
  switch (params.renormalize) {
    case Renormalize::On:
      return true;
    case Renormalize::Off:
      return false;
    case Renormalize::Auto:
      break;
  }
  return !(params.scheme == Scheme::ImplicitMidpoint && params.eps == 0.0);
}

void validate_flow_params(const FlowParams& params, const BoxGrid& grid) {
  if (!(params.eps >= 0.0 && params.eps <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
  if (!(params.dt > 0.0) || !std::isfinite(params.dt)) throw InvalidArgument("dt must be > 0");
  if (!(params.fp_tol > 0.0)) throw InvalidArgument("fp_tol must be > 0");
  if (params.fp_max_iters < 1) throw InvalidArgument("fp_max_iters must be >= 1");
  if (!(params.cfl_constant > 0.0)) throw InvalidArgument("cfl_constant must be > 0");
  if (params.scheme == Scheme::Rk4Projected && !params.override_cfl) {
    double hmin = grid.spacing(0);
    for (int a = 0; a < grid.dims(); ++a) hmin = std::min(hmin, grid.spacing(a));
    const double limit = params.cfl_constant * hmin * hmin;
    if (params.dt > limit) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "dt <= cfl_constant * h^2 violated (dt = " << params.dt << ", limit = " << limit
          << "); set override_cfl=true to bypass";
      throw InvalidArgument(msg.str());
    }
  }
}

StepResult step_rk4_projected(const FlowState& state, const FlowParams& params) {
  const double dt = params.dt;
  const double eps = params.eps;
  const VectorField& u = state.u;
  const std::size_t n = u.size();

  auto stage = [&](const VectorField& k, double c) {
    VectorField y = u;
    for (std::size_t p = 0; p < n; ++p) y[p] += (c * dt) * k[p];
    if (params.renormalize_stages) renormalize(y);
    return y;
  };
  const VectorField k1 = extrinsic_flow_rhs(u, eps);
  const VectorField k2 = extrinsic_flow_rhs(stage(k1, 0.5), eps);
  const VectorField k3 = extrinsic_flow_rhs(stage(k2, 0.5), eps);
  const VectorField k4 = extrinsic_flow_rhs(stage(k3, 1.0), eps);

  StepResult out{FlowState{state.t + dt, u, state.step_count + 1}, 1};
  VectorField& next = out.state.u;
  for (std::size_t p = 0; p < n; ++p) next[p] += (dt / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  if (!all_finite(next)) {
    const double lap = max_laplacian(u);
    std::ostringstream msg;
    msg << "integration blowup in RK4 step at t = " << state.t << " (max |Laplacian u| = " << lap
        << "); reduce dt";
    throw IntegrationBlowup(state.t, lap, msg.str());
  }
  if (renormalizes(params)) renormalize(next);
  return out;
}

StepResult step_implicit_midpoint(const FlowState& state, const FlowParams& params) {
  const double dt = params.dt;
  const double eps = params.eps;
  const VectorField& u = state.u;
  const std::size_t n = u.size();
  const bool one_d = u.grid().dims() == 1;

  VectorField v = u;
  VectorField mid(u.grid());
  std::vector<Vec3> r(n);
  int it = 0;
  double res = 0.0;
  while (true) {
    ++it;
    for (std::size_t p = 0; p < n; ++p) mid[p] = 0.5 * (u[p] + v[p]);
    const VectorField f = extrinsic_flow_rhs(mid, eps);
    res = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      r[p] = v[p] - u[p] - dt * f[p];
      res = std::max(res, max_abs(r[p]));
    }
    if (!std::isfinite(res)) {
      const double lap = max_laplacian(u);
      std::ostringstream msg;
      msg << "integration blowup in implicit midpoint solve at t = " << state.t
          << " (max |Laplacian u| = " << lap << ")";
      throw IntegrationBlowup(state.t, lap, msg.str());
    }
    if (res <= params.fp_tol) break;
    if (it >= params.fp_max_iters) {
      std::ostringstream msg;
      msg << "implicit midpoint did not converge at t = " << state.t << " after " << it
          << " iterations (residual " << res << " > " << params.fp_tol << "); try a smaller dt";
      throw StepFailure(state.t, it, res, msg.str());
    }
    for (auto& x : r) x = -x;
    if (one_d) solve_block_tridiagonal(mid, eps, dt, r);
    else solve_sparse(mid, eps, dt, r);
    for (std::size_t p = 0; p < n; ++p) v[p] += r[p];
  }
  if (renormalizes(params)) renormalize(v);
  return StepResult{FlowState{state.t + dt, std::move(v), state.step_count + 1}, it};
}

StepResult step(const FlowState& state, const FlowParams& params) {
  return params.scheme == Scheme::Rk4Projected ? step_rk4_projected(state, params)
                                               : step_implicit_midpoint(state, params);
}

Trajectory advance(const FlowState& state, const FlowParams& params, double t_final,
                   const AdvanceOptions& options) {
  validate_flow_params(params, state.u.grid());
  if (!(t_final >= state.t)) throw InvalidArgument("t_final must not precede the current time");
  Trajectory traj{{}, state, 0, false, {}};
  if (t_final == state.t) return traj;

  MonitorOptions monitor;
  monitor.eps = params.eps;
  monitor.sobolev = options.sobolev;
  if (state.u.grid().dims() == 1 && params.eps == 0.0) monitor.q0 = q_invariant(state.u);
  const std::size_t stride = std::max<std::size_t>(options.monitor_stride, 1);

  auto record = [&](const FlowState& s) {
    TrajectorySample sample{s.step_count, compute_record(s.u, s.t, monitor), std::nullopt};
    if (options.keep_fields) sample.field = s.u;
    traj.samples.push_back(std::move(sample));
  };

  const double t0 = state.t;
  const double span = t_final - t0;
  // Number of steps; a remainder below 1e-9 dt is absorbed into the last step.
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / params.dt - 1e-9)));

  FlowState cur = state;
  record(cur);
  FlowParams p = params;
  for (std::size_t k = 0; k < steps; ++k) {
    const bool last = k + 1 == steps;
    const double t_next = last ? t_final : t0 + static_cast<double>(k + 1) * params.dt;
    p.dt = t_next - cur.t;
    try {
      StepResult r = step(cur, p);
      traj.max_iterations = std::max(traj.max_iterations, r.iterations);
      cur = std::move(r.state);
      cur.t = t_next;
    } catch (const Error& e) {
      traj.failed = true;
      traj.failure = e.what();
      break;
    }
    const std::size_t done = k + 1;
    if (done % stride == 0 || last) record(cur);
    if (options.on_step && !options.on_step(cur)) {
      if (done % stride != 0 && !last) record(cur);
      break;
    }
  }
  traj.final_state = std::move(cur);
  return traj;
}

}  // namespace smflow
