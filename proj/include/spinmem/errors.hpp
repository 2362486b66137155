// Copyright 2026 The spinmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spinmem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested Hilbert-space dimension exceeds the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes or register layouts do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented precondition (non-Hermitian, not PSD, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The physical model is inconsistent with its assumptions.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinmem
