#ifndef NEURODETECT_SIC_HPP_
#define NEURODETECT_SIC_HPP_

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"

namespace neurodetect {

// One round of soft interference cancellation: for each user, subtract the
// other users' expected contributions, then soft-decode against a Gaussian
// whose covariance absorbs the residual interference variance.
std::vector<SoftEstimate> sic_iterate(const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& gains, double noise_var,
                                      const Constellation& cons,
                                      const std::vector<SoftEstimate>& priors);

// Full detector: `iterations` rounds from uniform initial estimates, then a
// per-user argmax (ties to the lowest symbol index).
std::vector<int> iterative_sic(const Eigen::VectorXd& y, const Eigen::MatrixXd& gains,
                               double noise_var, const Constellation& cons,
                               int iterations);

// Soft output variant, used by tests probing the fixed point.
std::vector<SoftEstimate> iterative_sic_soft(const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& gains,
                                             double noise_var,
                                             const Constellation& cons,
                                             int iterations);

// Unnormalized log posterior score of a candidate symbol-index vector.
// Log domain so exhaustive search never underflows.
using MimoLogScoreFn =
    std::function<double(const std::vector<int>& symbol_indices, const Eigen::VectorXd& y)>;

struct InstanceTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exhaustive MAP over all m^K candidates; ties break toward the smallest
// encoded index (user 0 least significant). Guards m^K <= 2^20.
std::vector<int> map_mimo_brute(const Eigen::VectorXd& y, const MimoLogScoreFn& score,
                                int users, int m);

// Exact log-likelihood scorer for the channel (uniform prior drops out).
MimoLogScoreFn exact_mimo_log_score(const MimoChannel& ch, const Constellation& cons);

}  // namespace neurodetect

#endif  // NEURODETECT_SIC_HPP_
