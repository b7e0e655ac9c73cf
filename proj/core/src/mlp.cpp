#include "neurodetect/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace neurodetect {

namespace {

constexpr double kProbFloor = 1e-12;

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z) {
  if (act == Activation::sigmoid) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return z.cwiseMax(0.0);
}

// derivative expressed through the activation output
Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& out) {
  if (act == Activation::sigmoid) {
    return (out.array() * (1.0 - out.array())).matrix();
  }
  return (out.array() > 0.0).cast<double>().matrix();
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd probs(logits.rows(), logits.cols());
  for (int b = 0; b < logits.cols(); ++b) {
    const Eigen::ArrayXd shifted =
        logits.col(b).array() - logits.col(b).maxCoeff();
    const Eigen::ArrayXd e = shifted.exp();
    probs.col(b) = e / e.sum();
  }
  return probs;
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("MlpSpec: need at least input and output dims");
  }
  for (int d : layer_dims) {
    if (d < 1) {
      throw std::invalid_argument("MlpSpec: layer dims must be positive");
    }
  }
  if (activations.size() != layer_dims.size() - 2) {
    throw std::invalid_argument("MlpSpec: one activation per hidden layer required");
  }
}

MlpParams init_params(const MlpSpec& spec, RngStream& rng) {
  spec.validate();
  MlpParams params;
  for (int i = 0; i < spec.weight_layers(); ++i) {
    const int rows = spec.layer_dims[static_cast<std::size_t>(i + 1)];
    const int cols = spec.layer_dims[static_cast<std::size_t>(i)];
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        w(r, c) = bound * (2.0 * rng.uniform() - 1.0);
      }
    }
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) {
      b(r) = bound * (2.0 * rng.uniform() - 1.0);
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(std::move(b));
  }
  return params;
}

BatchTrace forward_batch(const MlpSpec& spec, const MlpParams& params,
                         const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != spec.input_dim()) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  BatchTrace trace;
  trace.activations.push_back(inputs);
  const int n_layers = spec.weight_layers();
  for (int i = 0; i < n_layers; ++i) {
    Eigen::MatrixXd z =
        (params.weights[static_cast<std::size_t>(i)] * trace.activations.back())
            .colwise() +
        params.biases[static_cast<std::size_t>(i)];
    trace.pre.push_back(z);
    if (i + 1 < n_layers) {
      trace.activations.push_back(
          apply_activation(spec.activations[static_cast<std::size_t>(i)], z));
    }
  }
  trace.probs = softmax_columns(trace.pre.back());
  return trace;
}

Eigen::VectorXd forward(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::VectorXd& x) {
  return forward_batch(spec, params, x).probs.col(0);
}

double cross_entropy(const Eigen::VectorXd& probs, int label) {
  if (label < 0 || label >= probs.size()) {
    throw std::invalid_argument("cross_entropy: label out of range");
  }
  return -std::log(std::max(probs(label), kProbFloor));
}

MlpGrads MlpGrads::zeros(const MlpSpec& spec) {
  MlpGrads g;
  for (int i = 0; i < spec.weight_layers(); ++i) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(
        spec.layer_dims[static_cast<std::size_t>(i + 1)],
        spec.layer_dims[static_cast<std::size_t>(i)]));
    g.biases.emplace_back(
        Eigen::VectorXd::Zero(spec.layer_dims[static_cast<std::size_t>(i + 1)]));
  }
  return g;
}

void MlpGrads::add_scaled(const MlpGrads& other, double scale) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += scale * other.weights[i];
    biases[i] += scale * other.biases[i];
  }
}

Eigen::MatrixXd backward_batch(const MlpSpec& spec, const MlpParams& params,
                               const BatchTrace& trace,
                               const Eigen::MatrixXd& dlogits, MlpGrads& grads) {
  const int n_layers = spec.weight_layers();
  Eigen::MatrixXd delta = dlogits;
  for (int i = n_layers - 1; i >= 0; --i) {
    grads.weights[static_cast<std::size_t>(i)] +=
        delta * trace.activations[static_cast<std::size_t>(i)].transpose();
    grads.biases[static_cast<std::size_t>(i)] += delta.rowwise().sum();
    Eigen::MatrixXd dinput =
        params.weights[static_cast<std::size_t>(i)].transpose() * delta;
    if (i == 0) {
      return dinput;
    }
    delta = dinput.cwiseProduct(activation_grad(
        spec.activations[static_cast<std::size_t>(i - 1)],
        trace.activations[static_cast<std::size_t>(i)]));
  }
  return delta;  // unreachable for valid specs
}

Eigen::MatrixXd cross_entropy_dlogits(const Eigen::MatrixXd& probs,
                                      const std::vector<int>& labels) {
  Eigen::MatrixXd d = probs;
  const double inv_batch = 1.0 / static_cast<double>(probs.cols());
  for (int b = 0; b < probs.cols(); ++b) {
    d(labels[static_cast<std::size_t>(b)], b) -= 1.0;
  }
  return d * inv_batch;
}

Eigen::MatrixXd softmax_backward(const Eigen::MatrixXd& probs,
                                 const Eigen::MatrixXd& dprobs) {
  const Eigen::ArrayXXd weighted = probs.array() * dprobs.array();
  const Eigen::RowVectorXd colsum = weighted.colwise().sum();
  return (weighted - probs.array().rowwise() * colsum.array()).matrix();
}

AdamState AdamState::zeros(const MlpSpec& spec) {
  AdamState s;
  for (int i = 0; i < spec.weight_layers(); ++i) {
    const int rows = spec.layer_dims[static_cast<std::size_t>(i + 1)];
    const int cols = spec.layer_dims[static_cast<std::size_t>(i)];
    s.m_w.emplace_back(Eigen::MatrixXd::Zero(rows, cols));
    s.v_w.emplace_back(Eigen::MatrixXd::Zero(rows, cols));
    s.m_b.emplace_back(Eigen::VectorXd::Zero(rows));
    s.v_b.emplace_back(Eigen::VectorXd::Zero(rows));
  }
  return s;
}

void adam_update(MlpParams& params, const MlpGrads& grads, AdamState& state,
                 const TrainConfig& cfg) {
  ++state.step;
  const double correct1 = 1.0 - std::pow(cfg.adam_beta1, state.step);
  const double correct2 = 1.0 - std::pow(cfg.adam_beta2, state.step);
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    state.m_w[i] = cfg.adam_beta1 * state.m_w[i] + (1.0 - cfg.adam_beta1) * grads.weights[i];
    state.v_w[i] = cfg.adam_beta2 * state.v_w[i] +
                   (1.0 - cfg.adam_beta2) * grads.weights[i].cwiseProduct(grads.weights[i]);
    params.weights[i] -=
        (cfg.learning_rate * (state.m_w[i] / correct1).array() /
         ((state.v_w[i] / correct2).array().sqrt() + cfg.adam_eps))
            .matrix();
    state.m_b[i] = cfg.adam_beta1 * state.m_b[i] + (1.0 - cfg.adam_beta1) * grads.biases[i];
    state.v_b[i] = cfg.adam_beta2 * state.v_b[i] +
                   (1.0 - cfg.adam_beta2) * grads.biases[i].cwiseProduct(grads.biases[i]);
    params.biases[i] -=
        (cfg.learning_rate * (state.m_b[i] / correct1).array() /
         ((state.v_b[i] / correct2).array().sqrt() + cfg.adam_eps))
            .matrix();
  }
}

MlpParams train(const MlpSpec& spec, const TrainSet& data, const TrainConfig& cfg) {
  spec.validate();
  if (data.size() == 0) {
    throw std::invalid_argument("train: empty dataset");
  }
  if (cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("train: invalid TrainConfig");
  }
  RngStream init_rng(cfg.seed, 0);
  RngStream shuffle_rng(cfg.seed, 1);
  MlpParams params = init_params(spec, init_rng);
  AdamState adam = AdamState::zeros(spec);

  const int n = static_cast<int>(data.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = shuffle_rng.uniform_int(i + 1);
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int batch = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd inputs(spec.input_dim(), batch);
      std::vector<int> labels(static_cast<std::size_t>(batch));
      for (int b = 0; b < batch; ++b) {
        const int idx = order[static_cast<std::size_t>(start + b)];
        inputs.col(b) = data.inputs[static_cast<std::size_t>(idx)];
        labels[static_cast<std::size_t>(b)] = data.labels[static_cast<std::size_t>(idx)];
      }
      BatchTrace trace = forward_batch(spec, params, inputs);
      MlpGrads grads = MlpGrads::zeros(spec);
      backward_batch(spec, params, trace, cross_entropy_dlogits(trace.probs, labels),
                     grads);
      adam_update(params, grads, adam, cfg);
    }
  }
  return params;
}

double gradient_check(const MlpSpec& spec, const MlpParams& params,
                      const Eigen::VectorXd& x, int label) {
  constexpr double kStep = 1e-5;
  BatchTrace trace = forward_batch(spec, params, x);
  MlpGrads analytic = MlpGrads::zeros(spec);
  backward_batch(spec, params, trace,
                 cross_entropy_dlogits(trace.probs, {label}), analytic);

  MlpParams probe = params;
  auto loss_at = [&]() { return cross_entropy(forward(spec, probe, x), label); };
  double worst = 0.0;
  auto check = [&](double& theta, double g_analytic) {
    const double saved = theta;
    theta = saved + kStep;
    const double up = loss_at();
    theta = saved - kStep;
    const double down = loss_at();
    theta = saved;
    const double g_numeric = (up - down) / (2.0 * kStep);
    const double scale = std::max({1.0, std::abs(g_analytic), std::abs(g_numeric)});
    worst = std::max(worst, std::abs(g_analytic - g_numeric) / scale);
  };
  for (std::size_t i = 0; i < probe.weights.size(); ++i) {
    for (int r = 0; r < probe.weights[i].rows(); ++r) {
      for (int c = 0; c < probe.weights[i].cols(); ++c) {
        check(probe.weights[i](r, c), analytic.weights[i](r, c));
      }
    }
    for (int r = 0; r < probe.biases[i].size(); ++r) {
      check(probe.biases[i](r), analytic.biases[i](r));
    }
  }
  return worst;
}

}  // namespace neurodetect
