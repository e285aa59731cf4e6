// Copyright 2026 The DRNet Authors. All Rights Reserved.
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

namespace drnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value is outside its valid domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions do not match what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared in a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed or is corrupt.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A dataset directory is incomplete or inconsistent.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// An input value lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A metric's denominator is zero; the value is undefined rather than 0.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace drnet
