#include "neurodetect/constellation.hpp"

#include <stdexcept>

namespace neurodetect {

Constellation::Constellation(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("Constellation: need at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      if (points_[i] == points_[j]) {
        throw std::invalid_argument("Constellation: points must be distinct");
      }
    }
  }
}

}  // namespace neurodetect
