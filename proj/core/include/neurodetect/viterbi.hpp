#ifndef NEURODETECT_VITERBI_HPP_
#define NEURODETECT_VITERBI_HPP_

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace neurodetect {

// Per-symbol path cost: negative log-likelihood of one observation given the
// state window. Time-index free; stationarity means the same observation and
// state always cost the same.
using CostFn = std::function<double(double observation, int state)>;

// `sequential` emits decisions during the forward pass exactly as the classic
// algorithm prints them; `traceback` stores back-pointers and returns the
// global cost-minimizing sequence.
enum class ViterbiMode { sequential, traceback };

// Minimum-cost sequence detection over the m^l-state trellis. All initial
// path costs are zero. Ties break toward the lowest state index. Requires
// observations.size() > l.
std::vector<int> viterbi(const Eigen::VectorXd& observations, const CostFn& cost,
                         int l, int m, ViterbiMode mode);

}  // namespace neurodetect

#endif  // NEURODETECT_VITERBI_HPP_
