#pragma once

#include <stdexcept>
#include <string>

namespace bevclust {

/// Violated precondition or broken internal invariant; indicates a bug in the
/// caller or in this library, not bad data.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Malformed input data: bad file contents, bad configuration.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Failed filesystem access (open, read, write).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bevclust
