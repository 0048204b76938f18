#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Invalid (m, p, sigma, N) tuple or call-site option.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A routine was asked for something outside the regime it is defined for
// (e.g. the compactly supported profile when p >= p_F).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation outside the domain of a formula (f <= 0, xi <= 0, Z0 undefined).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Truncated origin series no longer dominated by its leading term.
class SeriesValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration produced a non-finite state. Carries a textual dump of the last
// accepted state so callers can report where things went wrong.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::string last_state)
      : std::runtime_error(what), last_state_(std::move(last_state)) {}
  const std::string& last_state() const noexcept { return last_state_; }

 private:
  std::string last_state_;
};

}  // namespace selfsim
