#include "qz/geometry.hpp"

#include <stdexcept>

namespace qz {

void validate(const Scenario& scenario) {
  if (!(scenario.cancellation_point.norm() > 0.0))
    throw std::invalid_argument("scenario: cancellation point must not sit on the source");
  if (!(scenario.c_mps > 0.0)) throw std::invalid_argument("scenario: c must be > 0");
  if (!(scenario.gain_ratio >= 0.0))
    throw std::invalid_argument("scenario: gain ratio must be >= 0");
}

} // namespace qz
