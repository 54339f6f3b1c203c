#pragma once

#include <string>
#include <vector>

namespace orlicz {

struct LogFactor {
  double power = 0.0;
  double shift = 2.0;  // log(shift + u); shift >= 2 keeps the log positive on u >= 0
};

// L(u) = coefficient * prod_i log(shift_i + u)^power_i.
struct SlowlyVaryingSpec {
  double coefficient = 1.0;
  std::vector<LogFactor> factors;

  static SlowlyVaryingSpec constant(double c = 1.0);
  static SlowlyVaryingSpec log_power(double s, double shift = 2.0);

  SlowlyVaryingSpec operator*(const SlowlyVaryingSpec& other) const;

  double operator()(double u) const;
  double log_value(double u) const;
  bool is_constant() const;
  void validate() const;
  std::string describe() const;
};

}  // namespace orlicz
