#pragma once

#include <stdexcept>
#include <string>

namespace cbgen {

// Parameters of the mechanism psi(l) = beta*l^2 + 2*beta*theta*l.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(double beta, double theta);

  double beta() const { return beta_; }
  double theta() const { return theta_; }
  // a = 2*beta*theta, the exponential rate shared by most closed forms.
  double rate() const { return 2.0 * beta_ * theta_; }

 private:
  double beta_ = 1.0;
  double theta_ = 1.0;
};

// Raised when an argument falls outside the domain of a law.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string quantity, double argument, std::string reason);

  const std::string& quantity() const { return quantity_; }
  double argument() const { return argument_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string quantity_;
  double argument_;
  std::string reason_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Work budget exhausted (event cap, interval cap).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two statistics cannot be compared (zero spread with differing means).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cbgen
