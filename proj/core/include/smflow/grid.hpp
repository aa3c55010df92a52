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
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "smflow/errors.hpp"
#include "smflow/vec3.hpp"

namespace smflow {

/// Uniform node-centred tensor grid on [0,1]^m, m in {1,2,3}.
///
/// Every axis carries N >= 3 nodes including both boundary nodes, so the
/// spacing is h = 1/(N-1). Fields are stored row-major with axis 0 slowest.
class BoxGrid {
 public:
  BoxGrid(int dims, int nodes_per_axis);
  explicit BoxGrid(std::vector<int> nodes_per_axis);

  int dims() const { return dims_; }
  int nodes(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double max_spacing() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

  /// Index of the node along `axis` for the flat index `p`.
  int axis_index(std::size_t p, int axis) const {
    return static_cast<int>((p / stride(axis)) % static_cast<std::size_t>(nodes(axis)));
  }
  double coord(int axis, int i) const { return i * spacing(axis); }
  /// Coordinates of node `p`; unused axes are 0.
  std::array<double, 3> position(std::size_t p) const;

  friend bool operator==(const BoxGrid& a, const BoxGrid& b) {
    return a.dims_ == b.dims_ && a.n_ == b.n_;
  }

 private:
  void init();

  int dims_ = 1;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 0;
};

/// Grid-sampled field, one value of type T per node.
template <class T>
class Field {
 public:
  explicit Field(BoxGrid grid, T init = T{}) : grid_(std::move(grid)), values_(grid_.size(), init) {}
  Field(BoxGrid grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GridError("field size does not match grid");
  }

  template <class Fn>
  static Field sample(const BoxGrid& grid, Fn&& fn) {
    Field out(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) out.values_[p] = fn(grid.position(p));
    return out;
  }

  const BoxGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t p) { return values_[p]; }
  const T& operator[](std::size_t p) const { return values_[p]; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  friend bool operator==(const Field& a, const Field& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  BoxGrid grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
using VectorField = Field<Vec3>;

enum class Side : int { Low = 0, High = 1 };

/// Value attached to one boundary node of one face.
template <class T>
struct BoundarySample {
  int axis = 0;
  Side side = Side::Low;
  std::size_t node = 0;
  T value{};
};

/// Second-order Laplacian with mirror ghosts (f[-1] := f[1]) on every face.
template <class T>
Field<T> laplacian_neumann(const Field<T>& f);

/// Second difference along a single axis with mirror ghosts.
template <class T>
Field<T> second_difference(const Field<T>& f, int axis);

enum class EdgeRule {
  Mirror,   ///< ghost f[-1] := f[1]; derivative along the axis is 0 on its faces
  OneSided  ///< second-order one-sided differences on the faces
};

/// Central first difference along `axis`; face treatment per `rule`.
template <class T>
Field<T> first_difference(const Field<T>& f, int axis, EdgeRule rule);

/// Per-axis central derivatives; normal derivative is 0 on each face (mirror).
template <class T>
std::vector<Field<T>> gradient_neumann(const Field<T>& f);

/// Composite trapezoid rule, tensor product in m dimensions.
double integrate(const ScalarField& f);
/// Trapezoid weight of node p.
double quadrature_weight(const BoxGrid& grid, std::size_t p);

ScalarField pointwise_norm2(const VectorField& f);
ScalarField pointwise_dot(const VectorField& a, const VectorField& b);
/// integrate(|f|^2)
double integrate_norm2(const VectorField& f);

/// Finite-difference weights for derivatives 0..max_deriv at x0 (Fornberg).
/// Result[m][j] is the weight of nodes[j] for the m-th derivative.
std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_deriv);

/// One-sided estimate of the outward normal derivative at every boundary node.
/// `order` is the accuracy order of the stencil and must be 1, 2 or 4.
template <class T>
std::vector<BoundarySample<T>> boundary_normal_derivative(const Field<T>& f, int order);

/// One-sided estimate of d^deriv f / dx_axis^deriv (coordinate direction, not
/// outward) on one face, with `accuracy` order, using deriv+accuracy nodes.
template <class T>
std::vector<BoundarySample<T>> boundary_derivative(const Field<T>& f, int axis, Side side, int deriv,
                                                   int accuracy);

inline constexpr int kDerivativeCap = 6;

/// Repeated central differencing with even (mirror) extension: even orders
/// apply the mirrored second difference, an odd order finishes with a mirrored
/// first difference.
template <class T>
Field<T> partial_derivative(const Field<T>& f, int axis, int order, int cap = kDerivativeCap);

/// Flat indices of all nodes on the face (axis, side).
std::vector<std::size_t> face_nodes(const BoxGrid& grid, int axis, Side side);

}  // namespace smflow
