#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rhlab {

class DomainMask;

/// Nodal values on the interior nodes of a DomainMask, in interior order.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {}
  ScalarField(std::size_t size, double fill) : values_(size, fill) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& data() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Throws ConfigError unless the field has one value per interior node.
void check_field(const ScalarField& field, const DomainMask& mask);

/// Throws DegenerateInputError on NaN or infinite entries.
void check_finite(const ScalarField& field, const char* what);

}  // namespace rhlab
