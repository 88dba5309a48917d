// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nbnsp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (u = 0 at a density
/// singularity, negative z for the Kummer series, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A series or quadrature failed to reach its tolerance.
class NumericalError : public Error {
  public:
    NumericalError(const std::string& what, double achieved, int evaluations)
        : Error(what + " (achieved error " + std::to_string(achieved) + " after "
                + std::to_string(evaluations) + " evaluations)"),
          achieved_(achieved),
          evaluations_(evaluations) {}

    double achieved() const noexcept { return achieved_; }
    int evaluations() const noexcept { return evaluations_; }

  private:
    double achieved_;
    int evaluations_;
};

/// Invalid parameters, bounds or configuration values.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Data that cannot support estimation (an empty component, ...).
class EstimationError : public Error {
  public:
    using Error::Error;
};

/// Malformed input files.
class ParseError : public Error {
  public:
    using Error::Error;
};

}  // namespace nbnsp
