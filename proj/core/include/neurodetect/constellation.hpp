#ifndef NEURODETECT_CONSTELLATION_HPP_
#define NEURODETECT_CONSTELLATION_HPP_

#include <vector>

namespace neurodetect {

// Ordered real symbol alphabet. The ordering is fixed at construction and
// determines the label indices 0..m-1 used everywhere else.
class Constellation {
 public:
  explicit Constellation(std::vector<double> points);

  static Constellation bpsk() { return Constellation({-1.0, 1.0}); }
  static Constellation ook() { return Constellation({0.0, 1.0}); }

  int size() const { return static_cast<int>(points_.size()); }
  double value(int index) const { return points_[static_cast<std::size_t>(index)]; }
  const std::vector<double>& points() const { return points_; }

 private:
  std::vector<double> points_;
};

}  // namespace neurodetect

#endif  // NEURODETECT_CONSTELLATION_HPP_
