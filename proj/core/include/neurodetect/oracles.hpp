#ifndef NEURODETECT_ORACLES_HPP_
#define NEURODETECT_ORACLES_HPP_

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"
#include "neurodetect/likelihood_model.hpp"
#include "neurodetect/viterbi.hpp"

namespace neurodetect {

// Reference implementations by exhaustive enumeration. They share the block
// model of the trellis detectors (uniform phantom prefix of l-1 symbols) but
// none of their recursions, so agreement is evidence, not tautology.

// Minimum-total-cost sequence over all m^(t+l-1) prefix+body assignments;
// returns the body. Ties break toward the smallest assignment code.
std::vector<int> exhaustive_min_cost_sequence(const Eigen::VectorXd& observations,
                                              const CostFn& cost, int l, int m);

// Per-symbol posteriors by summing the node-function products over all
// assignments.
std::vector<SoftEstimate> exhaustive_marginals(const Eigen::VectorXd& observations,
                                               const FunctionNodeFn& node, int l,
                                               int m);

// Analytic posterior p(state | y) and marginal p(y) for a finite-memory
// channel, derived directly from the exact per-state likelihoods. These are
// the plug-in substitutes for a trained LikelihoodModel.
PosteriorFn analytic_posterior(const FiniteMemoryChannel& ch, const Constellation& cons);
MarginalFn analytic_marginal(const FiniteMemoryChannel& ch, const Constellation& cons);

// Independently coded two-user AWGN MAP: a literal double loop over both
// users' symbols. Cross-checks map_mimo_brute.
std::vector<int> map_two_user_awgn_reference(const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& gains,
                                             double noise_var,
                                             const Constellation& cons);

}  // namespace neurodetect

#endif  // NEURODETECT_ORACLES_HPP_
