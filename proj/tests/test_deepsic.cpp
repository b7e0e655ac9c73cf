#include <doctest.h>

#include <cmath>

#include "neurodetect/deepsic.hpp"
#include "neurodetect/sic.hpp"

using namespace neurodetect;

namespace {

Dataset identity_awgn_dataset(int users, int count, double noise_var,
                              std::uint64_t seed) {
  const MimoChannel ch(NoiseKind::awgn,
                       Eigen::MatrixXd::Identity(users, users), noise_var);
  RngStream rng(seed, 0);
  return generate_dataset(ch, Constellation::bpsk(), count, rng);
}

}  // namespace

TEST_CASE("block input layout: y first, then the other users ascending") {
  Eigen::VectorXd y(2);
  y << 9.0, 8.0;
  std::vector<SoftEstimate> priors;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd p(2);
    p << 0.1 * (k + 1), 1.0 - 0.1 * (k + 1);
    priors.push_back(p);
  }
  const Eigen::VectorXd in = deepsic_block_input(y, priors, 1);
  REQUIRE(in.size() == 2 + 2 * 2);
  CHECK(in(0) == 9.0);
  CHECK(in(1) == 8.0);
  CHECK(in(2) == doctest::Approx(0.1));  // user 0
  CHECK(in(3) == doctest::Approx(0.9));
  CHECK(in(4) == doctest::Approx(0.3));  // user 2
  CHECK(in(5) == doctest::Approx(0.7));
}

TEST_CASE("permuting other users together with their slots changes nothing") {
  // swapping users 0 and 2 in the priors while asking for user 1's input
  // permutes the slot contents exactly; re-permuting restores the vector
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  std::vector<SoftEstimate> priors;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd p(2);
    p << 0.2 * (k + 1), 1.0 - 0.2 * (k + 1);
    priors.push_back(p);
  }
  std::vector<SoftEstimate> swapped = {priors[2], priors[1], priors[0]};
  const Eigen::VectorXd a = deepsic_block_input(y, priors, 1);
  const Eigen::VectorXd b = deepsic_block_input(y, swapped, 1);
  CHECK(a.segment(2, 2) == b.segment(4, 2));
  CHECK(a.segment(4, 2) == b.segment(2, 2));
}

TEST_CASE("single-user blocks see the observation alone") {
  const DeepSicNet net =
      make_deepsic_net(1, 2, 2, 3, DeepSicArch::end_to_end, 5);
  CHECK(net.block_spec.layer_dims.front() == 2);
  Eigen::VectorXd y(2);
  y << 0.4, -0.2;
  const std::vector<SoftEstimate> uniform{SoftEstimate::Constant(2, 0.5)};
  CHECK(deepsic_block_input(y, uniform, 0) == y);
  CHECK(is_soft_estimate(deepsic_forward(net, y)[0]));
}

TEST_CASE("the first column consumes exactly uniform estimates") {
  const DeepSicNet net = make_deepsic_net(3, 2, 2, 1, DeepSicArch::end_to_end, 4);
  Eigen::VectorXd y(2);
  y << 0.7, -0.4;
  const std::vector<SoftEstimate> uniform(3, SoftEstimate::Constant(2, 0.5));
  const auto out = deepsic_forward(net, y);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd expected =
        forward(net.block_spec, net.blocks[0][static_cast<std::size_t>(k)],
                deepsic_block_input(y, uniform, k));
    CHECK(out[static_cast<std::size_t>(k)] == expected);
  }
}

TEST_CASE("single user on a clean identity channel is decoded correctly") {
  const Constellation cons = Constellation::bpsk();
  const MimoChannel ch(NoiseKind::awgn, Eigen::MatrixXd::Identity(1, 1), 1e-4);
  RngStream train_rng(21, 0);
  const Dataset train = generate_dataset(ch, cons, 500, train_rng);
  DeepSicNet net = make_deepsic_net(1, 1, 2, 2, DeepSicArch::sequential, 22);
  TrainConfig cfg;
  cfg.seed = 23;
  cfg.max_epochs = 20;
  deepsic_train_seq(net, train, cfg);
  RngStream test_rng(24, 0);
  const Dataset test = generate_dataset(ch, cons, 200, test_rng);
  for (std::size_t i = 0; i < test.size(); ++i) {
    CHECK(deepsic_detect(net, test.observations[i]) == test.labels[i]);
  }
}

TEST_CASE("forward outputs are valid soft estimates") {
  const DeepSicNet net = make_deepsic_net(3, 3, 2, 2, DeepSicArch::sequential, 6);
  RngStream rng(71, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd y(3);
    for (int j = 0; j < 3; ++j) {
      y(j) = 2.0 * rng.gaussian();
    }
    for (const auto& p : deepsic_forward(net, y)) {
      CHECK(is_soft_estimate(p));
    }
  }
}

TEST_CASE("argmax ties resolve to the lowest index") {
  std::vector<SoftEstimate> uniform{SoftEstimate::Constant(4, 0.25)};
  CHECK(decide(uniform) == std::vector<int>{0});
}

TEST_CASE("sum cross-entropy vanishes on a perfectly predicted batch") {
  // one user, zero weights and a huge logit gap: the block emits exactly
  // (1, 0) for every observation
  DeepSicNet net = make_deepsic_net(1, 1, 2, 1, DeepSicArch::end_to_end, 7);
  for (auto& column : net.blocks) {
    for (auto& block : column) {
      for (auto& w : block.weights) {
        w.setZero();
      }
      for (auto& b : block.biases) {
        b.setZero();
      }
      block.biases.back()(0) = 1000.0;
    }
  }
  Dataset data;
  for (int i = 0; i < 10; ++i) {
    data.labels.push_back({0});
    data.observations.push_back(Eigen::VectorXd::Constant(1, 0.1 * i));
  }
  CHECK(deepsic_sum_cross_entropy(net, data) == 0.0);
}

TEST_CASE("grid gradients match finite differences on a tiny net") {
  DeepSicNet net = make_deepsic_net(2, 2, 2, 2, DeepSicArch::end_to_end, 8);
  // shrink to 5 hidden units
  net.block_spec.layer_dims = {2 + 2, 5, 2};
  for (auto& column : net.blocks) {
    for (std::size_t k = 0; k < column.size(); ++k) {
      RngStream rng(90 + k, 0);
      column[k] = init_params(net.block_spec, rng);
    }
  }
  const Dataset data = identity_awgn_dataset(2, 12, 0.5, 9);

  for (bool stop_gradient : {false, true}) {
    CAPTURE(stop_gradient);
    const auto analytic = deepsic_sum_ce_gradients(net, data, stop_gradient);
    // finite differences of the (full-graph) loss; with stop_gradient the
    // analytic gradient drops the prior paths, so only compare the top column
    const double h = 1e-5;
    double worst = 0.0;
    for (int q = stop_gradient ? net.iterations() - 1 : 0; q < net.iterations(); ++q) {
      for (int k = 0; k < net.users; ++k) {
        auto& params = net.blocks[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)];
        const auto& grad = analytic[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)];
        for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
          for (int r = 0; r < params.weights[layer].rows(); ++r) {
            for (int c = 0; c < params.weights[layer].cols(); ++c) {
              double& theta = params.weights[layer](r, c);
              const double saved = theta;
              theta = saved + h;
              const double up = deepsic_sum_cross_entropy(net, data);
              theta = saved - h;
              const double down = deepsic_sum_cross_entropy(net, data);
              theta = saved;
              const double numeric = (up - down) / (2.0 * h);
              const double g = grad.weights[layer](r, c);
              const double scale = std::max({1.0, std::abs(g), std::abs(numeric)});
              worst = std::max(worst, std::abs(g - numeric) / scale);
            }
          }
        }
      }
    }
    if (!stop_gradient) {
      CHECK(worst <= 1e-5);
    } else {
      // top column gradients are unaffected by the stop
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("e2e training lowers the sum cross-entropy") {
  const Dataset data = identity_awgn_dataset(2, 5000, 0.3, 10);
  DeepSicNet net = make_deepsic_net(2, 2, 2, 2, DeepSicArch::end_to_end, 11);
  const double initial = deepsic_sum_cross_entropy(net, data);
  DeepSicTrainOptions opts;
  opts.base.seed = 12;
  opts.base.max_epochs = 10;
  deepsic_train_e2e(net, data, opts);
  const double trained = deepsic_sum_cross_entropy(net, data);
  CHECK(trained < initial);
}

TEST_CASE("sequential training with one iteration equals per-block training") {
  const Dataset data = identity_awgn_dataset(2, 300, 0.4, 13);
  DeepSicNet net = make_deepsic_net(2, 2, 2, 1, DeepSicArch::sequential, 14);
  TrainConfig cfg;
  cfg.seed = 15;
  cfg.max_epochs = 4;
  deepsic_train_seq(net, data, cfg);

  // replicate block (0, k) by hand: uniform priors, same derived seed
  for (int k = 0; k < 2; ++k) {
    TrainSet set;
    const std::vector<SoftEstimate> uniform(2, SoftEstimate::Constant(2, 0.5));
    for (std::size_t i = 0; i < data.size(); ++i) {
      set.inputs.push_back(deepsic_block_input(data.observations[i], uniform, k));
      set.labels.push_back(data.labels[i][static_cast<std::size_t>(k)]);
    }
    TrainConfig block_cfg = cfg;
    block_cfg.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(k);
    const MlpParams expected = train(net.block_spec, set, block_cfg);
    for (std::size_t layer = 0; layer < expected.weights.size(); ++layer) {
      CHECK(net.blocks[0][static_cast<std::size_t>(k)].weights[layer] ==
            expected.weights[layer]);
    }
  }
}

TEST_CASE("sequentially trained DeepSIC approaches scalar MAP on a decoupled channel") {
  const Constellation cons = Constellation::bpsk();
  const double noise_var = 0.5;
  const MimoChannel ch(NoiseKind::awgn, Eigen::MatrixXd::Identity(2, 2), noise_var);
  RngStream train_rng(16, 0);
  const Dataset train_data = generate_dataset(ch, cons, 2500, train_rng);

  DeepSicNet net = make_deepsic_net(2, 2, 2, 2, DeepSicArch::sequential, 17);
  TrainConfig cfg;
  cfg.seed = 18;
  cfg.max_epochs = 30;
  deepsic_train_seq(net, train_data, cfg);

  RngStream test_rng(19, 0);
  const Dataset test_data = generate_dataset(ch, cons, 5000, test_rng);
  const MimoLogScoreFn score = exact_mimo_log_score(ch, cons);
  long net_err = 0, map_err = 0;
  for (std::size_t i = 0; i < test_data.size(); ++i) {
    const auto net_dec = deepsic_detect(net, test_data.observations[i]);
    const auto map_dec = map_mimo_brute(test_data.observations[i], score, 2, 2);
    for (int k = 0; k < 2; ++k) {
      net_err += net_dec[static_cast<std::size_t>(k)] != test_data.labels[i][static_cast<std::size_t>(k)];
      map_err += map_dec[static_cast<std::size_t>(k)] != test_data.labels[i][static_cast<std::size_t>(k)];
    }
  }
  const double n = 2.0 * static_cast<double>(test_data.size());
  const double ser_net = net_err / n;
  const double ser_map = map_err / n;
  const double combined = std::sqrt(ser_net * (1 - ser_net) / n) +
                          std::sqrt(ser_map * (1 - ser_map) / n);
  CHECK(ser_net <= ser_map + 2.0 * combined);
}

TEST_CASE("detection is deterministic") {
  const DeepSicNet net = make_deepsic_net(2, 2, 2, 3, DeepSicArch::end_to_end, 20);
  Eigen::VectorXd y(2);
  y << 0.3, -1.1;
  CHECK(deepsic_detect(net, y) == deepsic_detect(net, y));
}
