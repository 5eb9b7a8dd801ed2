#include "rhlab/field.hpp"

#include <cmath>
#include <string>

#include "rhlab/errors.hpp"
#include "rhlab/mesh.hpp"

namespace rhlab {

void check_field(const ScalarField& field, const DomainMask& mask) {
  if (field.size() != mask.interior_count()) {
    throw ConfigError("field has " + std::to_string(field.size()) + " values but the domain has " +
                      std::to_string(mask.interior_count()) + " interior nodes");
  }
}

void check_finite(const ScalarField& field, const char* what) {
  for (double v : field.values()) {
    if (!std::isfinite(v)) throw DegenerateInputError(std::string(what) + " has a non-finite value");
  }
}

}  // namespace rhlab
