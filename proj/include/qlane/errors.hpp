#pragma once

#include <stdexcept>
#include <string>

namespace qlane {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration or parameter ranges.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. Message names the offending record.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A payoff table is missing a (state, role, self, opponent) record.
class CompletenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlane
