#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vexp {

/// Input outside the admissible range of an operation (bad exponent, bad grid).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values, failed brackets, divergent iterations.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run configuration that cannot be accepted. Carries every violated
/// constraint, not just the first one found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace vexp
