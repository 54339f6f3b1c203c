#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace orlicz {

struct Provenance {
  nlohmann::json generator;  // generator descriptor, null for external data
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string source;        // "generated" or the file it was loaded from
};

class Sample {
 public:
  explicit Sample(std::vector<double> values, Provenance provenance = {});

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Provenance& provenance() const { return provenance_; }

  Sample scaled(double c) const;

 private:
  std::vector<double> values_;
  Provenance provenance_;
};

}  // namespace orlicz
