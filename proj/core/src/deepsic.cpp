#include "neurodetect/deepsic.hpp"

#include <numeric>
#include <stdexcept>

namespace neurodetect {

namespace {

// Stacks [Y; priors of users != k] for a whole batch, matching
// deepsic_block_input column by column.
Eigen::MatrixXd block_input_batch(const Eigen::MatrixXd& y_batch,
                                  const std::vector<Eigen::MatrixXd>& priors,
                                  int user, int symbols) {
  const int users = static_cast<int>(priors.size());
  const int n_r = static_cast<int>(y_batch.rows());
  const int batch = static_cast<int>(y_batch.cols());
  Eigen::MatrixXd input(n_r + (users - 1) * symbols, batch);
  input.topRows(n_r) = y_batch;
  int row = n_r;
  for (int l = 0; l < users; ++l) {
    if (l == user) {
      continue;
    }
    input.middleRows(row, symbols) = priors[static_cast<std::size_t>(l)];
    row += symbols;
  }
  return input;
}

Eigen::MatrixXd gather_observations(const Dataset& data, const std::vector<int>& idx,
                                    int n_r) {
  Eigen::MatrixXd y(n_r, static_cast<int>(idx.size()));
  for (std::size_t b = 0; b < idx.size(); ++b) {
    y.col(static_cast<int>(b)) = data.observations[static_cast<std::size_t>(idx[b])];
  }
  return y;
}

std::uint64_t block_seed(std::uint64_t seed, int q, int k) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(q) * 997ULL +
         static_cast<std::uint64_t>(k);
}

}  // namespace

MlpSpec deepsic_block_spec(int users, int antennas, int symbols, DeepSicArch arch) {
  const int input = antennas + (users - 1) * symbols;
  MlpSpec spec;
  if (arch == DeepSicArch::end_to_end) {
    spec.layer_dims = {input, 60, symbols};
    spec.activations = {Activation::relu};
  } else {
    spec.layer_dims = {input, 100, 50, symbols};
    spec.activations = {Activation::sigmoid, Activation::relu};
  }
  return spec;
}

DeepSicNet make_deepsic_net(int users, int antennas, int symbols, int iterations,
                            DeepSicArch arch, std::uint64_t seed) {
  if (users < 1 || antennas < 1 || iterations < 1) {
    throw std::invalid_argument("make_deepsic_net: invalid dimensions");
  }
  DeepSicNet net;
  net.users = users;
  net.antennas = antennas;
  net.symbols = symbols;
  net.block_spec = deepsic_block_spec(users, antennas, symbols, arch);
  net.blocks.resize(static_cast<std::size_t>(iterations));
  for (int q = 0; q < iterations; ++q) {
    for (int k = 0; k < users; ++k) {
      RngStream rng(block_seed(seed, q, k), 0);
      net.blocks[static_cast<std::size_t>(q)].push_back(
          init_params(net.block_spec, rng));
    }
  }
  return net;
}

Eigen::VectorXd deepsic_block_input(const Eigen::VectorXd& y,
                                    const std::vector<SoftEstimate>& priors, int user) {
  const int users = static_cast<int>(priors.size());
  const int m = static_cast<int>(priors.front().size());
  Eigen::VectorXd input(y.size() + (users - 1) * m);
  input.head(y.size()) = y;
  int row = static_cast<int>(y.size());
  for (int l = 0; l < users; ++l) {
    if (l == user) {
      continue;
    }
    input.segment(row, m) = priors[static_cast<std::size_t>(l)];
    row += m;
  }
  return input;
}

std::vector<SoftEstimate> deepsic_forward(const DeepSicNet& net,
                                          const Eigen::VectorXd& y) {
  if (y.size() != net.antennas) {
    throw std::invalid_argument("deepsic_forward: observation length mismatch");
  }
  std::vector<SoftEstimate> estimates(
      static_cast<std::size_t>(net.users),
      SoftEstimate::Constant(net.symbols, 1.0 / net.symbols));
  for (int q = 0; q < net.iterations(); ++q) {
    std::vector<SoftEstimate> refined(static_cast<std::size_t>(net.users));
    for (int k = 0; k < net.users; ++k) {
      refined[static_cast<std::size_t>(k)] =
          forward(net.block_spec, net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)],
                  deepsic_block_input(y, estimates, k));
    }
    estimates = std::move(refined);
  }
  return estimates;
}

std::vector<int> deepsic_detect(const DeepSicNet& net, const Eigen::VectorXd& y) {
  return decide(deepsic_forward(net, y));
}

namespace {

// Forward + backward over the whole grid for the given sample subset; fills
// `grads` with the gradient of the mean sum cross-entropy.
void grid_gradients(const DeepSicNet& net, const Dataset& data,
                    const std::vector<int>& idx, bool stop_gradient,
                    std::vector<std::vector<MlpGrads>>& grads) {
  const int batch = static_cast<int>(idx.size());
  const int users = net.users;
  const int m = net.symbols;
  const int n_r = net.antennas;
  const int iters = net.iterations();
  const Eigen::MatrixXd y_batch = gather_observations(data, idx, n_r);

  // forward through the grid, keeping every trace
  std::vector<Eigen::MatrixXd> estimates(
      static_cast<std::size_t>(users), Eigen::MatrixXd::Constant(m, batch, 1.0 / m));
  std::vector<std::vector<BatchTrace>> traces(static_cast<std::size_t>(iters));
  for (int q = 0; q < iters; ++q) {
    std::vector<Eigen::MatrixXd> refined(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
      BatchTrace trace = forward_batch(
          net.block_spec,
          net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)],
          block_input_batch(y_batch, estimates, k, m));
      refined[static_cast<std::size_t>(k)] = trace.probs;
      traces[static_cast<std::size_t>(q)].push_back(std::move(trace));
    }
    estimates = std::move(refined);
  }

  // backward: sum cross-entropy at the final column, then through the
  // estimate connections unless stop_gradient is set
  std::vector<Eigen::MatrixXd> dprior(static_cast<std::size_t>(users),
                                      Eigen::MatrixXd::Zero(m, batch));
  for (int q = iters - 1; q >= 0; --q) {
    std::vector<Eigen::MatrixXd> dprior_next(static_cast<std::size_t>(users),
                                             Eigen::MatrixXd::Zero(m, batch));
    for (int k = 0; k < users; ++k) {
      const BatchTrace& trace =
          traces[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)];
      Eigen::MatrixXd dlogits;
      if (q == iters - 1) {
        std::vector<int> labels(static_cast<std::size_t>(batch));
        for (int b = 0; b < batch; ++b) {
          labels[static_cast<std::size_t>(b)] =
              data.labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])]
                         [static_cast<std::size_t>(k)];
        }
        dlogits = cross_entropy_dlogits(trace.probs, labels);
      } else {
        dlogits = softmax_backward(trace.probs, dprior[static_cast<std::size_t>(k)]);
      }
      const Eigen::MatrixXd dinput = backward_batch(
          net.block_spec,
          net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)], trace,
          dlogits, grads[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)]);
      if (q > 0 && !stop_gradient) {
        int row = n_r;
        for (int l = 0; l < users; ++l) {
          if (l == k) {
            continue;
          }
          dprior_next[static_cast<std::size_t>(l)] += dinput.middleRows(row, m);
          row += m;
        }
      }
    }
    dprior = std::move(dprior_next);
  }
}

std::vector<std::vector<MlpGrads>> zero_grid_grads(const DeepSicNet& net) {
  std::vector<std::vector<MlpGrads>> grads(static_cast<std::size_t>(net.iterations()));
  for (int q = 0; q < net.iterations(); ++q) {
    for (int k = 0; k < net.users; ++k) {
      grads[static_cast<std::size_t>(q)].push_back(MlpGrads::zeros(net.block_spec));
    }
  }
  return grads;
}

}  // namespace

std::vector<std::vector<MlpGrads>> deepsic_sum_ce_gradients(const DeepSicNet& net,
                                                            const Dataset& data,
                                                            bool stop_gradient) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  auto grads = zero_grid_grads(net);
  grid_gradients(net, data, all, stop_gradient, grads);
  return grads;
}

void deepsic_train_e2e(DeepSicNet& net, const Dataset& data,
                       const DeepSicTrainOptions& opts) {
  if (data.size() == 0) {
    throw std::invalid_argument("deepsic_train_e2e: empty dataset");
  }
  const TrainConfig& cfg = opts.base;
  const int n = static_cast<int>(data.size());
  const int users = net.users;
  const int iters = net.iterations();

  std::vector<std::vector<AdamState>> adam(static_cast<std::size_t>(iters));
  for (int q = 0; q < iters; ++q) {
    for (int k = 0; k < users; ++k) {
      adam[static_cast<std::size_t>(q)].push_back(AdamState::zeros(net.block_spec));
    }
  }

  RngStream shuffle_rng(cfg.seed, 2);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = shuffle_rng.uniform_int(i + 1);
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int batch = std::min(cfg.batch_size, n - start);
      const std::vector<int> idx(order.begin() + start, order.begin() + start + batch);
      auto grads = zero_grid_grads(net);
      grid_gradients(net, data, idx, opts.stop_gradient, grads);
      for (int q = 0; q < iters; ++q) {
        for (int k = 0; k < users; ++k) {
          adam_update(net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)],
                      grads[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)],
                      adam[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)], cfg);
        }
      }
    }
  }
}

void deepsic_train_seq(DeepSicNet& net, const Dataset& data, const TrainConfig& cfg) {
  if (data.size() == 0) {
    throw std::invalid_argument("deepsic_train_seq: empty dataset");
  }
  const int n = static_cast<int>(data.size());
  const int users = net.users;
  const int m = net.symbols;
  const int n_r = net.antennas;

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const Eigen::MatrixXd y_all = gather_observations(data, all, n_r);

  // column q-1 estimates for every training sample, refreshed per column
  std::vector<Eigen::MatrixXd> estimates(
      static_cast<std::size_t>(users), Eigen::MatrixXd::Constant(m, n, 1.0 / m));

  for (int q = 0; q < net.iterations(); ++q) {
    for (int k = 0; k < users; ++k) {
      TrainSet set;
      set.inputs.reserve(static_cast<std::size_t>(n));
      set.labels.reserve(static_cast<std::size_t>(n));
      const Eigen::MatrixXd in = block_input_batch(y_all, estimates, k, m);
      for (int i = 0; i < n; ++i) {
        set.inputs.push_back(in.col(i));
        set.labels.push_back(
            data.labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
      }
      TrainConfig block_cfg = cfg;
      block_cfg.seed = block_seed(cfg.seed, q, k);
      net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)] =
          train(net.block_spec, set, block_cfg);
    }
    std::vector<Eigen::MatrixXd> refined(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
      refined[static_cast<std::size_t>(k)] =
          forward_batch(net.block_spec,
                        net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)],
                        block_input_batch(y_all, estimates, k, m))
              .probs;
    }
    estimates = std::move(refined);
  }
}

double deepsic_sum_cross_entropy(const DeepSicNet& net, const Dataset& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto estimates = deepsic_forward(net, data.observations[i]);
    for (int k = 0; k < net.users; ++k) {
      total += cross_entropy(estimates[static_cast<std::size_t>(k)],
                             data.labels[i][static_cast<std::size_t>(k)]);
    }
  }
  return total / static_cast<double>(data.size());
}

}  // namespace neurodetect
