#pragma once

#include <stdexcept>
#include <string>

namespace pemwe {

// Raised when an operation is called outside its mathematical domain
// (non-positive amounts, malformed trajectories, bad mesh sizes).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Newton iteration of an implicit step did not reach the tolerance.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm_(residual_norm) {}
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double residual_norm_;
};

// An accepted step left the admissible state set by more than the
// validity tolerance. This is a solver bug signal, never clamped away.
class StateViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The slow update produced a non-positive iridium inventory.
class DepletionError : public std::runtime_error {
 public:
  DepletionError(const std::string& what, double time_s)
      : std::runtime_error(what), time_s_(time_s) {}
  double time_s() const noexcept { return time_s_; }

 private:
  double time_s_;
};

// Bad configuration text. `key()` names the offending entry (may be empty
// for purely syntactic problems, in which case `line()` is set).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

// Malformed CSV input; `line()` is 1-based within the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pemwe
