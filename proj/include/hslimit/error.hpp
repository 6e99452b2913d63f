#pragma once

#include <stdexcept>
#include <string>

namespace hslimit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative density,
/// singular pressure at or above the congestion level, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration (bad keys, unsupported model combination).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Requested time step exceeds the explicit stability bound.
class StabilityError : public Error {
public:
  using Error::Error;
};

/// Singular-pressure density reached the congestion level.
class BlowUpError : public Error {
public:
  using Error::Error;
};

} // namespace hslimit
