#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kftrack {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed serialized data (RLE text, ground-truth lines, JSON payloads).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Semantically invalid argument or configuration.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Operation undefined for the given inputs (e.g. distance to an empty box).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace kftrack
