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

#include "smflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smflow {

BoxGrid::BoxGrid(int dims, int nodes_per_axis) {
  if (dims < 1 || dims > 3) throw GridError("grid dimension must be 1, 2 or 3");
  dims_ = dims;
  for (int a = 0; a < dims; ++a) n_[static_cast<std::size_t>(a)] = nodes_per_axis;
  init();
}

BoxGrid::BoxGrid(std::vector<int> nodes_per_axis) {
  if (nodes_per_axis.empty() || nodes_per_axis.size() > 3)
    throw GridError("grid dimension must be 1, 2 or 3");
  dims_ = static_cast<int>(nodes_per_axis.size());
  for (std::size_t a = 0; a < nodes_per_axis.size(); ++a) n_[a] = nodes_per_axis[a];
  init();
}

void BoxGrid::init() {
  for (int a = 0; a < dims_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (n_[ua] < 3)
      throw GridError("need at least 3 nodes per axis, got " + std::to_string(n_[ua]) + " on axis " +
                      std::to_string(a));
    h_[ua] = 1.0 / (n_[ua] - 1);
  }
  std::size_t s = 1;
  for (int a = dims_ - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = s;
    s *= static_cast<std::size_t>(n_[static_cast<std::size_t>(a)]);
  }
  size_ = s;
}

double BoxGrid::max_spacing() const {
  double h = 0.0;
  for (int a = 0; a < dims_; ++a) h = std::max(h, spacing(a));
  return h;
}

std::array<double, 3> BoxGrid::position(std::size_t p) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dims_; ++a) x[static_cast<std::size_t>(a)] = coord(a, axis_index(p, a));
  return x;
}

std::vector<std::size_t> face_nodes(const BoxGrid& grid, int axis, Side side) {
  const int target = side == Side::Low ? 0 : grid.nodes(axis) - 1;
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (grid.axis_index(p, axis) == target) out.push_back(p);
  return out;
}

template <class T>
Field<T> second_difference(const Field<T>& f, int axis) {
  const BoxGrid& g = f.grid();
  const std::size_t s = g.stride(axis);
  const int n = g.nodes(axis);
  const double inv = 1.0 / (g.spacing(axis) * g.spacing(axis));
  Field<T> out(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const int i = g.axis_index(p, axis);
    const std::size_t lo = i == 0 ? p + s : p - s;
    const std::size_t hi = i == n - 1 ? p - s : p + s;
    out[p] = (f[lo] - 2.0 * f[p] + f[hi]) * inv;
  }
  return out;
}

template <class T>
Field<T> laplacian_neumann(const Field<T>& f) {
  const BoxGrid& g = f.grid();
  Field<T> out(g);
  for (int a = 0; a < g.dims(); ++a) {
    const std::size_t s = g.stride(a);
    const int n = g.nodes(a);
    const double inv = 1.0 / (g.spacing(a) * g.spacing(a));
    for (std::size_t p = 0; p < g.size(); ++p) {
      const int i = g.axis_index(p, a);
      const std::size_t lo = i == 0 ? p + s : p - s;
      const std::size_t hi = i == n - 1 ? p - s : p + s;
      out[p] += (f[lo] - 2.0 * f[p] + f[hi]) * inv;
    }
  }
  return out;
}

template <class T>
Field<T> first_difference(const Field<T>& f, int axis, EdgeRule rule) {
  const BoxGrid& g = f.grid();
  const std::size_t s = g.stride(axis);
  const int n = g.nodes(axis);
  const double h = g.spacing(axis);
  Field<T> out(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const int i = g.axis_index(p, axis);
    if (i > 0 && i < n - 1) {
      out[p] = (f[p + s] - f[p - s]) * (0.5 / h);
    } else if (rule == EdgeRule::Mirror) {
      out[p] = T{};
    } else if (i == 0) {
      out[p] = (-3.0 * f[p] + 4.0 * f[p + s] - f[p + 2 * s]) * (0.5 / h);
    } else {
      out[p] = (3.0 * f[p] - 4.0 * f[p - s] + f[p - 2 * s]) * (0.5 / h);
    }
  }
  return out;
}

template <class T>
std::vector<Field<T>> gradient_neumann(const Field<T>& f) {
  std::vector<Field<T>> out;
  out.reserve(static_cast<std::size_t>(f.grid().dims()));
  for (int a = 0; a < f.grid().dims(); ++a) out.push_back(first_difference(f, a, EdgeRule::Mirror));
  return out;
}

double quadrature_weight(const BoxGrid& grid, std::size_t p) {
  double w = 1.0;
  for (int a = 0; a < grid.dims(); ++a) {
    const int i = grid.axis_index(p, a);
    const bool edge = i == 0 || i == grid.nodes(a) - 1;
    w *= edge ? 0.5 * grid.spacing(a) : grid.spacing(a);
  }
  return w;
}

double integrate(const ScalarField& f) {
  const BoxGrid& g = f.grid();
  if (g.dims() == 1) {
    const std::size_t n = g.size();
    double interior = 0.0;
    for (std::size_t p = 1; p + 1 < n; ++p) interior += f[p];
    return g.spacing(0) * (interior + 0.5 * (f[0] + f[n - 1]));
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) sum += quadrature_weight(g, p) * f[p];
  return sum;
}

ScalarField pointwise_norm2(const VectorField& f) {
  ScalarField out(f.grid());
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = norm2(f[p]);
  return out;
}

ScalarField pointwise_dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < a.size(); ++p) out[p] = dot(a[p], b[p]);
  return out;
}

double integrate_norm2(const VectorField& f) { return integrate(pointwise_norm2(f)); }

std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_deriv) {
  const int n = static_cast<int>(nodes.size());
  const int m = max_deriv;
  // c[k][j]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  auto at = [&c](int k, int j) -> double& { return c[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; };
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  at(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) at(k, i) = c1 * (k * at(k - 1, i - 1) - c5 * at(k, i - 1)) / c2;
        at(0, i) = -c1 * c5 * at(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) at(k, j) = (c4 * at(k, j) - k * at(k - 1, j)) / c3;
      at(0, j) = c4 * at(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

template <class T>
std::vector<BoundarySample<T>> boundary_derivative(const Field<T>& f, int axis, Side side, int deriv,
                                                   int accuracy) {
  const BoxGrid& g = f.grid();
  if (axis < 0 || axis >= g.dims()) throw InvalidArgument("axis out of range");
  if (deriv < 1 || accuracy < 1) throw InvalidArgument("derivative and accuracy orders must be positive");
  const int width = deriv + accuracy;
  if (width > g.nodes(axis))
    throw GridError("one-sided stencil of " + std::to_string(width) + " nodes does not fit " +
                    std::to_string(g.nodes(axis)) + " nodes on axis " + std::to_string(axis));
  const double h = g.spacing(axis);
  std::vector<double> offsets(static_cast<std::size_t>(width));
  for (int j = 0; j < width; ++j) offsets[static_cast<std::size_t>(j)] = side == Side::Low ? j : -j;
  const auto weights = fornberg_weights(0.0, offsets, deriv)[static_cast<std::size_t>(deriv)];
  const double scale = 1.0 / std::pow(h, deriv);
  const std::size_t s = g.stride(axis);

  std::vector<BoundarySample<T>> out;
  for (std::size_t p : face_nodes(g, axis, side)) {
    T acc{};
    for (int j = 0; j < width; ++j) {
      const std::size_t q = side == Side::Low ? p + static_cast<std::size_t>(j) * s
                                              : p - static_cast<std::size_t>(j) * s;
      acc += weights[static_cast<std::size_t>(j)] * f[q];
    }
    out.push_back({axis, side, p, acc * scale});
  }
  return out;
}

template <class T>
std::vector<BoundarySample<T>> boundary_normal_derivative(const Field<T>& f, int order) {
  if (order != 1 && order != 2 && order != 4)
    throw InvalidArgument("boundary stencil order must be 1, 2 or 4");
  std::vector<BoundarySample<T>> out;
  for (int a = 0; a < f.grid().dims(); ++a) {
    for (Side side : {Side::Low, Side::High}) {
      auto face = boundary_derivative(f, a, side, 1, order);
      const double sign = side == Side::Low ? -1.0 : 1.0;
      for (auto& s : face) {
        s.value = sign * s.value;
        out.push_back(s);
      }
    }
  }
  return out;
}

template <class T>
Field<T> partial_derivative(const Field<T>& f, int axis, int order, int cap) {
  if (order < 0) throw InvalidArgument("derivative order must be nonnegative");
  if (order > cap)
    throw InvalidArgument("derivative order " + std::to_string(order) + " exceeds cap " +
                          std::to_string(cap));
  if (axis < 0 || axis >= f.grid().dims()) throw InvalidArgument("axis out of range");
  Field<T> out = f;
  for (int q = 0; q < order / 2; ++q) out = second_difference(out, axis);
  if (order % 2 == 1) out = first_difference(out, axis, EdgeRule::Mirror);
  return out;
}

#define SMFLOW_INSTANTIATE_GRID_OPS(T)                                                             \
  template Field<T> laplacian_neumann<T>(const Field<T>&);                                         \
  template Field<T> second_difference<T>(const Field<T>&, int);                                    \
  template Field<T> first_difference<T>(const Field<T>&, int, EdgeRule);                           \
  template std::vector<Field<T>> gradient_neumann<T>(const Field<T>&);                             \
  template std::vector<BoundarySample<T>> boundary_normal_derivative<T>(const Field<T>&, int);     \
  template std::vector<BoundarySample<T>> boundary_derivative<T>(const Field<T>&, int, Side, int,  \
                                                                 int);                             \
  template Field<T> partial_derivative<T>(const Field<T>&, int, int, int);

SMFLOW_INSTANTIATE_GRID_OPS(double)
SMFLOW_INSTANTIATE_GRID_OPS(Vec3)

#undef SMFLOW_INSTANTIATE_GRID_OPS

}  // namespace smflow
