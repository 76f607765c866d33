#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chldp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or shape violation on user-supplied input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Time integration aborted (non-finite state, blow-up, or step-size bound exceeded).
class SolverAbort : public Error {
 public:
  SolverAbort(std::string what, std::size_t step)
      : Error(std::move(what) + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Configuration rejected by validation; carries the violated hypothesis tag.
class ConfigError : public Error {
 public:
  ConfigError(std::string tag, const std::string& what)
      : Error(tag.empty() ? what : tag + ": " + what), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

}  // namespace chldp
