#pragma once

#include <stdexcept>
#include <string>

namespace bathcool {

/// Argument outside the domain of a formula (negative time, T <= 0, unreachable target, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fock truncation too small for the requested accuracy.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integration left its tolerance envelope. Carries the offending time and diagnostics.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time, double trace, double min_value)
      : std::runtime_error(what), time_(time), trace_(trace), min_value_(min_value) {}

  double time() const noexcept { return time_; }
  double trace() const noexcept { return trace_; }
  /// Smallest eigenvalue (density matrix) or smallest population (ladder) at the failure.
  double min_value() const noexcept { return min_value_; }

 private:
  double time_;
  double trace_;
  double min_value_;
};

}  // namespace bathcool
