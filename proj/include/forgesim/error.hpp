#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forgesim {

/// Malformed input text (FCIDUMP, config, JSON).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Structurally valid input that violates a domain constraint.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a result that fails a numerical consistency check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem size exceeds what the dense/desk-scale solvers accept.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run configuration is invalid; nothing has been computed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forgesim

namespace forgesim {

/// A perturber state is (nearly) degenerate with the reference while
/// coupling to it.
class IntruderStateError : public NumericalError {
 public:
  IntruderStateError(const std::string& what, std::vector<std::size_t> states)
      : NumericalError(what), states_(std::move(states)) {}
  const std::vector<std::size_t>& states() const { return states_; }

 private:
  std::vector<std::size_t> states_;
};

}  // namespace forgesim
