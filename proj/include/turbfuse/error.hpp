#pragma once

#include <stdexcept>
#include <string>

namespace turbfuse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised for file-system and codec failures. The message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace turbfuse
