#pragma once

#include <stdexcept>
#include <string>

namespace rodwave {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration. `path()` is the JSON path when the error
/// originates from a config document, otherwise empty.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what, std::string path = {})
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Argument outside the mathematical domain of an operation (f <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation exactly on a singular frequency of a closed form.
class SingularFrequencyError : public DomainError {
public:
  using DomainError::DomainError;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// An invariant check failed on computed data.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace rodwave
