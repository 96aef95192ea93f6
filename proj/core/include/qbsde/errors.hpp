// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qbsde {

enum class ErrorKind {
  config,
  validation,
  domain,
  range,
  not_locally_integrable,
  unsupported,
  inapplicable,
  precondition,
  simulation,
  regression,
  resolution,
  numerical,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base class of every error raised by the library. The kind drives the CLI
/// exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define QBSDE_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(Kind, what) {}   \
  }

QBSDE_DEFINE_ERROR(ConfigError, ErrorKind::config);
QBSDE_DEFINE_ERROR(ValidationError, ErrorKind::validation);
QBSDE_DEFINE_ERROR(DomainError, ErrorKind::domain);
QBSDE_DEFINE_ERROR(RangeError, ErrorKind::range);
QBSDE_DEFINE_ERROR(NotLocallyIntegrableError, ErrorKind::not_locally_integrable);
QBSDE_DEFINE_ERROR(UnsupportedError, ErrorKind::unsupported);
QBSDE_DEFINE_ERROR(InapplicableError, ErrorKind::inapplicable);
QBSDE_DEFINE_ERROR(PreconditionError, ErrorKind::precondition);
QBSDE_DEFINE_ERROR(SimulationError, ErrorKind::simulation);
QBSDE_DEFINE_ERROR(RegressionError, ErrorKind::regression);
QBSDE_DEFINE_ERROR(ResolutionError, ErrorKind::resolution);
QBSDE_DEFINE_ERROR(NumericalError, ErrorKind::numerical);

#undef QBSDE_DEFINE_ERROR

}  // namespace qbsde
