#ifndef NEURODETECT_CHANNEL_LIKELIHOOD_HPP_
#define NEURODETECT_CHANNEL_LIKELIHOOD_HPP_

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"
#include "neurodetect/viterbi.hpp"

namespace neurodetect {

// Likelihoods are floored at this value before any log, keeping every cost
// finite. Applied identically to exact and learned likelihoods so the two
// routes stay comparable term by term.
inline constexpr double kLikelihoodFloor = 1e-12;

// Exact negative log-likelihood -log p(y | window) under the channel.
// AWGN: 0.5*ln(2*pi) + 0.5*(y - mean)^2. Poisson: rate - y*ln(rate) + ln(y!).
CostFn exact_cost(const FiniteMemoryChannel& ch, const Constellation& cons);

// Exact chain factor: (1/m) * p(y | state) when (state, prev) is
// shift-consistent, 0 otherwise.
FunctionNodeFn exact_function_node(const FiniteMemoryChannel& ch,
                                   const Constellation& cons);

// Conditional mean of the channel output for every state window, indexed by
// the trellis encoding. Shared by the exact likelihoods and the test oracles.
Eigen::VectorXd state_means(const FiniteMemoryChannel& ch, const Constellation& cons);

}  // namespace neurodetect

#endif  // NEURODETECT_CHANNEL_LIKELIHOOD_HPP_
