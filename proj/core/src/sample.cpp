#include "orlicz/sample.hpp"

#include <cmath>

#include "orlicz/error.hpp"

namespace orlicz {

Sample::Sample(std::vector<double> values, Provenance provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
  require(!values_.empty(), ErrorKind::kValidation, "sample is empty");
  for (double v : values_)
    require(std::isfinite(v), ErrorKind::kValidation, "sample holds a non-finite value");
}

Sample Sample::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  Provenance p = provenance_;
  p.source += p.source.empty() ? "" : " ";
  p.source += "scaled";
  return Sample(std::move(v), std::move(p));
}

}  // namespace orlicz
