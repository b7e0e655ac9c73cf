#ifndef NEURODETECT_LIKELIHOOD_MODEL_HPP_
#define NEURODETECT_LIKELIHOOD_MODEL_HPP_

#include <functional>

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"
#include "neurodetect/gmm.hpp"
#include "neurodetect/mlp.hpp"
#include "neurodetect/viterbi.hpp"

namespace neurodetect {

// Learned replacement for the channel likelihood: a classifier estimating
// p(state | y) plus a mixture estimate of the output marginal p(y). One
// trained instance serves both the trellis and the sum-product detector.
struct LikelihoodModel {
  MlpSpec spec;
  MlpParams params;
  Gmm marginal;
  int memory = 1;   // l
  int symbols = 2;  // m
};

// State posterior estimate over the m^l windows for a scalar observation.
using PosteriorFn = std::function<Eigen::VectorXd(double y)>;
// Output marginal density estimate.
using MarginalFn = std::function<double(double y)>;

// Classifier architecture used for scalar-observation channels:
// 1 x 100 x 50 x m^l with sigmoid and ReLU hidden activations.
MlpSpec likelihood_classifier_spec(int l, int m);

// Trains the classifier on (y -> state index) with cross-entropy and fits an
// m^l-component Gaussian mixture to the observed outputs.
LikelihoodModel train_likelihood_model(const Dataset& data, int l, int m,
                                       const TrainConfig& cfg);

PosteriorFn model_posterior(const LikelihoodModel& model);
MarginalFn model_marginal(const LikelihoodModel& model);

// Bayes inversion of a posterior/marginal pair into a path cost:
// cost(y, s) = -log( m^l * posterior(y)[s] * marginal(y) ), floored like the
// exact costs. Accepts any estimator pair, so analytically exact functions
// plug in wherever a trained model would.
CostFn bayes_cost(PosteriorFn posterior, MarginalFn marginal, int l, int m);

// Same inversion wrapped in the chain-factor template: (1/m) * likelihood
// when shift-consistent, 0 otherwise.
FunctionNodeFn bayes_function_node(PosteriorFn posterior, MarginalFn marginal, int l,
                                   int m);

CostFn learned_cost(const LikelihoodModel& model);
FunctionNodeFn learned_function_node(const LikelihoodModel& model);

std::vector<int> viterbinet_detect(const LikelihoodModel& model,
                                   const Eigen::VectorXd& observations,
                                   ViterbiMode mode = ViterbiMode::traceback);

std::vector<int> bcjrnet_detect(const LikelihoodModel& model,
                                const Eigen::VectorXd& observations);

}  // namespace neurodetect

#endif  // NEURODETECT_LIKELIHOOD_MODEL_HPP_
