// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace zonoridge {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class RegistryMismatch : public Error {
  public:
    RegistryMismatch() : Error("forms belong to different symbol registries") {}
};

class ShapeMismatch : public Error {
  public:
    using Error::Error;
};

class DegreeError : public Error {
  public:
    using Error::Error;
};

class SingularMatrix : public Error {
  public:
    using Error::Error;
};

class BudgetExceeded : public Error {
  public:
    using Error::Error;
};

/// Input data problems (missing file, bad cell, empty table, ...).
class DataError : public Error {
  public:
    using Error::Error;
};

class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Raised by the non-data solve when the M-matrix condition fails; the caller
/// is expected to fall back to splitting.
class LambdaTooSmall : public Error {
  public:
    LambdaTooSmall(double beta, double lambda)
        : Error("regularization " + std::to_string(lambda) + " is below beta " + std::to_string(beta)),
          beta_(beta) {}
    [[nodiscard]] double beta() const noexcept { return beta_; }

  private:
    double beta_;
};

} // namespace zonoridge
