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

#include <stdexcept>
#include <string>

namespace smflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid shape or stencil-fit problems (too few nodes, unsupported dimension).
class GridError : public Error {
 public:
  using Error::Error;
};

/// A pointwise constraint (unit norm, tangency) was violated beyond tolerance.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// Argument outside the admissible range (eps outside [0,1], k too large, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A NaN/Inf appeared during time stepping.
class IntegrationBlowup : public Error {
 public:
  IntegrationBlowup(double time, double max_laplacian, const std::string& what)
      : Error(what), time_(time), max_laplacian_(max_laplacian) {}
  double time() const { return time_; }
  double max_laplacian() const { return max_laplacian_; }

 private:
  double time_;
  double max_laplacian_;
};

/// The implicit solver did not converge within its iteration budget.
class StepFailure : public Error {
 public:
  StepFailure(double time, int iterations, double residual, const std::string& what)
      : Error(what), time_(time), iterations_(iterations), residual_(residual) {}
  double time() const { return time_; }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  double time_;
  int iterations_;
  double residual_;
};

/// File system or format errors; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smflow
