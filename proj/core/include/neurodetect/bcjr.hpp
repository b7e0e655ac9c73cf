#ifndef NEURODETECT_BCJR_HPP_
#define NEURODETECT_BCJR_HPP_

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace neurodetect {

// Local factor of the channel chain: f(y, state, prev_state) >= 0, and zero
// whenever (state, prev_state) is not shift-consistent.
using FunctionNodeFn =
    std::function<double(double observation, int state, int prev_state)>;

// Per-symbol posterior over the constellation; entries >= 0 and sum to 1.
using SoftEstimate = Eigen::VectorXd;

// Thrown when a forward or backward message vector collapses to all zeros,
// i.e. the observation block is impossible under the node function.
struct DegenerateEvidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Forward-backward sum-product over the m^l-state chain: returns one
// SoftEstimate per observation. Messages are kept in the linear domain and
// sum-normalized each step; the constants cancel in the posterior. Requires
// observations.size() > l.
std::vector<SoftEstimate> bcjr(const Eigen::VectorXd& observations,
                               const FunctionNodeFn& node, int l, int m);

// Hard decisions from posteriors; ties break toward the lowest symbol index.
std::vector<int> decide(const std::vector<SoftEstimate>& posteriors);

inline bool is_soft_estimate(const SoftEstimate& p, double tol = 1e-9) {
  return p.size() > 0 && p.minCoeff() >= 0.0 && std::abs(p.sum() - 1.0) <= tol;
}

}  // namespace neurodetect

#endif  // NEURODETECT_BCJR_HPP_
