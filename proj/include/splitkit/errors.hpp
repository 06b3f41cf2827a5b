// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_ERRORS_HPP_
#define SPLITKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace splitkit {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed problem data: non-PSD quadratic, inconsistent affine system,
// invalid dimensions, bad configuration values.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A linear system required by a prox or subproblem solve is singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// A subproblem has no closed-form update in this build (ADMM catalog limits).
class UnsupportedSubproblemError : public Error {
 public:
  using Error::Error;
};

// Iterates left the finite range.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// A rate formula was requested although its hypothesis does not hold.
class ConditionNotMetError : public Error {
 public:
  using Error::Error;
};

// Empirical rate fitting got a sequence it cannot fit.
class DegenerateSequenceError : public Error {
 public:
  using Error::Error;
};

// A candidate solution failed a required residual check.
class NotInIntersectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace splitkit

#endif  // SPLITKIT_ERRORS_HPP_
