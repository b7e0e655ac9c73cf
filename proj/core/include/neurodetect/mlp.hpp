#ifndef NEURODETECT_MLP_HPP_
#define NEURODETECT_MLP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "neurodetect/rng.hpp"

namespace neurodetect {

enum class Activation { sigmoid, relu };

// Dense classifier: layer_dims[0] inputs, layer_dims.back() classes behind a
// softmax head, one activation per hidden layer.
struct MlpSpec {
  std::vector<int> layer_dims;
  std::vector<Activation> activations;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int weight_layers() const { return static_cast<int>(layer_dims.size()) - 1; }
  void validate() const;
};

struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;  // weights[i]: dims[i+1] x dims[i]
  std::vector<Eigen::VectorXd> biases;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int max_epochs = 100;
  int batch_size = 27;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainSet {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<int> labels;

  std::size_t size() const { return inputs.size(); }
};

// Fan-in-scaled uniform initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in))
// for weights and biases, drawn layer by layer (weights row-major, then the
// bias vector).
MlpParams init_params(const MlpSpec& spec, RngStream& rng);

// Softmax class probabilities for one input.
Eigen::VectorXd forward(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::VectorXd& x);

// -log(probs[label]), with probabilities floored at 1e-12.
double cross_entropy(const Eigen::VectorXd& probs, int label);

// Shuffled mini-batch Adam for the full epoch budget; deterministic given
// cfg.seed (which drives both initialization and the per-epoch shuffle).
MlpParams train(const MlpSpec& spec, const TrainSet& data, const TrainConfig& cfg);

// Max discrepancy between back-propagated gradients and central finite
// differences (step 1e-5) over all parameters, measured as
// |g_a - g_n| / max(1, |g_a|, |g_n|).
double gradient_check(const MlpSpec& spec, const MlpParams& params,
                      const Eigen::VectorXd& x, int label);

// --- batch-level pieces, shared with the DeepSIC trainer ---

// Columns are samples. activations[0] is the input batch, activations[i] the
// output of weight layer i-1 after its nonlinearity; probs holds the softmax.
struct BatchTrace {
  std::vector<Eigen::MatrixXd> activations;
  std::vector<Eigen::MatrixXd> pre;  // pre-activation per weight layer
  Eigen::MatrixXd probs;
};

BatchTrace forward_batch(const MlpSpec& spec, const MlpParams& params,
                         const Eigen::MatrixXd& inputs);

struct MlpGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGrads zeros(const MlpSpec& spec);
  void add_scaled(const MlpGrads& other, double scale);
};

// Back-propagates dL/dlogits through the trace, accumulating parameter
// gradients into `grads`; returns dL/dinput.
Eigen::MatrixXd backward_batch(const MlpSpec& spec, const MlpParams& params,
                               const BatchTrace& trace,
                               const Eigen::MatrixXd& dlogits, MlpGrads& grads);

// dL/dlogits of the mean cross-entropy over the batch: (probs - onehot)/B.
Eigen::MatrixXd cross_entropy_dlogits(const Eigen::MatrixXd& probs,
                                      const std::vector<int>& labels);

// Converts a gradient w.r.t. softmax outputs into one w.r.t. logits.
Eigen::MatrixXd softmax_backward(const Eigen::MatrixXd& probs,
                                 const Eigen::MatrixXd& dprobs);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step = 0;

  static AdamState zeros(const MlpSpec& spec);
};

void adam_update(MlpParams& params, const MlpGrads& grads, AdamState& state,
                 const TrainConfig& cfg);

}  // namespace neurodetect

#endif  // NEURODETECT_MLP_HPP_
