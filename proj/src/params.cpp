#include "cbgen/params.hpp"

#include <cmath>
#include <sstream>

namespace cbgen {

namespace {

std::string format_domain_message(const std::string& quantity, double argument,
                                  const std::string& reason) {
  std::ostringstream os;
  os << quantity << ": argument " << argument << " " << reason;
  return os.str();
}

}  // namespace

ModelParams::ModelParams(double beta, double theta) : beta_(beta), theta_(theta) {
  if (!(std::isfinite(beta) && beta > 0.0))
    throw DomainError("params", beta, "beta must be positive and finite");
  if (!(std::isfinite(theta) && theta > 0.0))
    throw DomainError("params", theta, "theta must be positive and finite");
}

DomainError::DomainError(std::string quantity, double argument, std::string reason)
    : std::domain_error(format_domain_message(quantity, argument, reason)),
      quantity_(std::move(quantity)),
      argument_(argument),
      reason_(std::move(reason)) {}

}  // namespace cbgen
