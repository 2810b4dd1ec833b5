#pragma once

#include <stdexcept>
#include <string>

namespace tailrisk {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Operation not available for the given family or problem size.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

// A theorem hypothesis required by an asymptotic formula does not hold.
// `hypothesis()` names the violated condition.
class PreconditionError : public Error {
public:
  PreconditionError(std::string hypothesis, const std::string& detail)
      : Error(hypothesis + ": " + detail), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
  std::string hypothesis_;
};

// Malformed configuration. `key_path()` points at the offending entry,
// e.g. "y_laws[1].beta".
class ConfigError : public Error {
public:
  ConfigError(std::string key_path, const std::string& detail)
      : Error(key_path.empty() ? detail : key_path + ": " + detail),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

private:
  std::string key_path_;
};

}  // namespace tailrisk
