#include "neurodetect/likelihood_model.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/trellis.hpp"

namespace neurodetect {

namespace {

// Evaluates the Bayes-inverted likelihood vector for one observation and
// memoizes it. Detectors sweep all states for a fixed y before moving on, so
// one estimator evaluation serves the whole sweep; the lock keeps shared use
// across threads safe.
class LikelihoodCache {
 public:
  LikelihoodCache(PosteriorFn posterior, MarginalFn marginal, int n_states)
      : posterior_(std::move(posterior)),
        marginal_(std::move(marginal)),
        n_states_(n_states) {}

  double value(double y, int state) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!valid_ || y != cached_y_) {
      const Eigen::VectorXd post = posterior_(y);
      if (post.size() != n_states_) {
        throw std::invalid_argument("bayes likelihood: posterior has wrong length");
      }
      const double marg = marginal_(y);
      cached_ = (static_cast<double>(n_states_) * marg) * post;
      cached_y_ = y;
      valid_ = true;
    }
    return cached_(state);
  }

 private:
  PosteriorFn posterior_;
  MarginalFn marginal_;
  int n_states_;
  std::mutex mu_;
  bool valid_ = false;
  double cached_y_ = 0.0;
  Eigen::VectorXd cached_;
};

}  // namespace

MlpSpec likelihood_classifier_spec(int l, int m) {
  MlpSpec spec;
  spec.layer_dims = {1, 100, 50, trellis_state_count(m, l)};
  spec.activations = {Activation::sigmoid, Activation::relu};
  return spec;
}

LikelihoodModel train_likelihood_model(const Dataset& data, int l, int m,
                                       const TrainConfig& cfg) {
  if (data.size() == 0) {
    throw std::invalid_argument("train_likelihood_model: empty dataset");
  }
  LikelihoodModel model;
  model.memory = l;
  model.symbols = m;
  model.spec = likelihood_classifier_spec(l, m);

  TrainSet set;
  std::vector<double> outputs;
  set.inputs.reserve(data.size());
  set.labels.reserve(data.size());
  outputs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (static_cast<int>(data.labels[i].size()) != l || data.observations[i].size() != 1) {
      throw std::invalid_argument(
          "train_likelihood_model: expected scalar observations with length-l windows");
    }
    set.inputs.push_back(data.observations[i]);
    set.labels.push_back(encode_window(data.labels[i], m));
    outputs.push_back(data.observations[i](0));
  }
  model.params = train(model.spec, set, cfg);
  model.marginal = fit_gmm(outputs, trellis_state_count(m, l), kGmmDefaultMaxIters,
                           kGmmDefaultTol, cfg.seed);
  return model;
}

PosteriorFn model_posterior(const LikelihoodModel& model) {
  auto spec = std::make_shared<MlpSpec>(model.spec);
  auto params = std::make_shared<MlpParams>(model.params);
  return [spec, params](double y) {
    return forward(*spec, *params, Eigen::VectorXd::Constant(1, y));
  };
}

MarginalFn model_marginal(const LikelihoodModel& model) {
  auto mixture = std::make_shared<Gmm>(model.marginal);
  return [mixture](double y) { return gmm_pdf(*mixture, y); };
}

CostFn bayes_cost(PosteriorFn posterior, MarginalFn marginal, int l, int m) {
  auto cache = std::make_shared<LikelihoodCache>(
      std::move(posterior), std::move(marginal), trellis_state_count(m, l));
  return [cache](double y, int state) {
    return -std::log(std::max(cache->value(y, state), kLikelihoodFloor));
  };
}

FunctionNodeFn bayes_function_node(PosteriorFn posterior, MarginalFn marginal, int l,
                                   int m) {
  auto cache = std::make_shared<LikelihoodCache>(
      std::move(posterior), std::move(marginal), trellis_state_count(m, l));
  return [cache, l, m](double y, int state, int prev_state) {
    if (!shift_consistent(state, prev_state, m, l)) {
      return 0.0;
    }
    return std::max(cache->value(y, state), kLikelihoodFloor) /
           static_cast<double>(m);
  };
}

CostFn learned_cost(const LikelihoodModel& model) {
  return bayes_cost(model_posterior(model), model_marginal(model), model.memory,
                    model.symbols);
}

FunctionNodeFn learned_function_node(const LikelihoodModel& model) {
  return bayes_function_node(model_posterior(model), model_marginal(model),
                             model.memory, model.symbols);
}

std::vector<int> viterbinet_detect(const LikelihoodModel& model,
                                   const Eigen::VectorXd& observations,
                                   ViterbiMode mode) {
  return viterbi(observations, learned_cost(model), model.memory, model.symbols, mode);
}

std::vector<int> bcjrnet_detect(const LikelihoodModel& model,
                                const Eigen::VectorXd& observations) {
  return decide(
      bcjr(observations, learned_function_node(model), model.memory, model.symbols));
}

}  // namespace neurodetect
