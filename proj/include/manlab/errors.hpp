// Copyright 2026 The manlab Authors
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

namespace manlab {

/// Inputs of incompatible shape or dimension.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition does not hold (non-unitary input, non-collinear
/// algebra where collinearity is required, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity left its admissible range by more than rounding.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Randomized structure recovery failed repeatedly.
class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Ratio estimator whose denominator is statistically indistinguishable from 0.
class IllConditionedEstimator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace manlab
