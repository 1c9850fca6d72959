// Copyright 2026 The qthermo Authors
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

namespace qthermo {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible size or incompatible system (H, beta).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The diagonal of the input equals the Gibbs diagonal, so the qubit channel
/// is not determined by the populations.
class SingularInputError : public Error {
 public:
  using Error::Error;
};

/// The requested diagonal transition violates thermo-majorization.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a unitary or channel (e.g. "realizes the cycle") fails.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qthermo
