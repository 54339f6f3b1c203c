#include "orlicz/slowly_varying.hpp"

#include <cmath>
#include <sstream>

#include "orlicz/error.hpp"

namespace orlicz {

SlowlyVaryingSpec SlowlyVaryingSpec::constant(double c) {
  SlowlyVaryingSpec s;
  s.coefficient = c;
  s.validate();
  return s;
}

SlowlyVaryingSpec SlowlyVaryingSpec::log_power(double power, double shift) {
  SlowlyVaryingSpec s;
  if (power != 0.0) s.factors.push_back({power, shift});
  s.validate();
  return s;
}

SlowlyVaryingSpec SlowlyVaryingSpec::operator*(const SlowlyVaryingSpec& other) const {
  SlowlyVaryingSpec out = *this;
  out.coefficient *= other.coefficient;
  out.factors.insert(out.factors.end(), other.factors.begin(), other.factors.end());
  return out;
}

double SlowlyVaryingSpec::log_value(double u) const {
  require(u >= 0.0, ErrorKind::kDomain, "slowly varying function evaluated at negative u");
  double acc = std::log(coefficient);
  for (const auto& f : factors) acc += f.power * std::log(std::log(f.shift + u));
  return acc;
}

double SlowlyVaryingSpec::operator()(double u) const { return std::exp(log_value(u)); }

bool SlowlyVaryingSpec::is_constant() const {
  for (const auto& f : factors)
    if (f.power != 0.0) return false;
  return true;
}

void SlowlyVaryingSpec::validate() const {
  require(coefficient > 0.0 && std::isfinite(coefficient), ErrorKind::kValidation,
          "slowly varying coefficient must be positive and finite");
  for (const auto& f : factors) {
    require(std::isfinite(f.power), ErrorKind::kValidation, "log power must be finite");
    require(f.shift >= 2.0, ErrorKind::kValidation, "log shift must be >= 2");
  }
}

std::string SlowlyVaryingSpec::describe() const {
  std::ostringstream os;
  os << coefficient;
  for (const auto& f : factors) os << "*log(" << f.shift << "+u)^" << f.power;
  return os.str();
}

}  // namespace orlicz
