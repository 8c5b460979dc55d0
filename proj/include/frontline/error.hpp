// Copyright 2026 The Frontline Authors. All Rights Reserved.
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

#ifndef FRONTLINE_ERROR_HPP_
#define FRONTLINE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace frontline {

// Base class of every error raised by the library. Callers that only need
// to report a failure can catch this; tests match on the concrete kinds.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizes or shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Values outside the declared domain of an input (e.g. a probability > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values (thresholds, scales, counts).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A front mask with no foreground pixel.
class NoFrontError : public Error {
 public:
  using Error::Error;
};

// An operation that requires foreground received an empty mask.
class EmptyMaskError : public Error {
 public:
  using Error::Error;
};

// Manifest, sample or file-format problems.
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Missing or incompatible model checkpoints.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during optimisation.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace frontline

#endif  // FRONTLINE_ERROR_HPP_
