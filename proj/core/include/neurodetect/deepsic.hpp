#ifndef NEURODETECT_DEEPSIC_HPP_
#define NEURODETECT_DEEPSIC_HPP_

#include <vector>

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"
#include "neurodetect/mlp.hpp"

namespace neurodetect {

// Grid of K x Q classifier blocks replacing the model-based cancellation and
// soft-decoding stages. Block (k, q) maps the channel output concatenated
// with the other users' iteration-(q-1) estimates to user k's refined
// estimate; every block shares the same architecture.
struct DeepSicNet {
  MlpSpec block_spec;
  std::vector<std::vector<MlpParams>> blocks;  // [iteration q][user k]
  int users = 1;     // K
  int antennas = 1;  // n_r
  int symbols = 2;   // m

  int iterations() const { return static_cast<int>(blocks.size()); }
};

enum class DeepSicArch {
  end_to_end,  // (n_r + (K-1)m) x 60 x m, ReLU
  sequential,  // (n_r + (K-1)m) x 100 x 50 x m, sigmoid + ReLU
};

MlpSpec deepsic_block_spec(int users, int antennas, int symbols, DeepSicArch arch);

// Freshly initialized grid; block (q, k) draws its parameters from a seed
// substream derived from `seed`, so construction is fully reproducible.
DeepSicNet make_deepsic_net(int users, int antennas, int symbols, int iterations,
                            DeepSicArch arch, std::uint64_t seed);

// Block input layout: y first, then the other users' estimates in ascending
// user order, m entries each.
Eigen::VectorXd deepsic_block_input(const Eigen::VectorXd& y,
                                    const std::vector<SoftEstimate>& priors, int user);

// Runs the grid from uniform initial estimates; returns the final column.
std::vector<SoftEstimate> deepsic_forward(const DeepSicNet& net,
                                          const Eigen::VectorXd& y);

std::vector<int> deepsic_detect(const DeepSicNet& net, const Eigen::VectorXd& y);

struct DeepSicTrainOptions {
  TrainConfig base;
  // When set, gradients do not flow through the inter-iteration estimate
  // connections during end-to-end training.
  bool stop_gradient = false;
};

// Joint Adam minimization of the sum cross-entropy of the final column over
// all K*Q blocks, back-propagating through the soft-estimate connections.
void deepsic_train_e2e(DeepSicNet& net, const Dataset& data,
                       const DeepSicTrainOptions& opts);

// Trains iteration columns one at a time: each of the K blocks of column q is
// fit independently on (y, column q-1 estimates) -> user label, then the
// column's outputs are recomputed to feed the next one. Earlier columns are
// never revisited.
void deepsic_train_seq(DeepSicNet& net, const Dataset& data, const TrainConfig& cfg);

// Mean sum cross-entropy of the final column over a dataset.
double deepsic_sum_cross_entropy(const DeepSicNet& net, const Dataset& data);

// Analytic gradient of the mean sum cross-entropy w.r.t. every block's
// parameters, indexed [iteration][user]. Exposed for the finite-difference
// checks alongside the trainer that consumes it.
std::vector<std::vector<MlpGrads>> deepsic_sum_ce_gradients(const DeepSicNet& net,
                                                            const Dataset& data,
                                                            bool stop_gradient = false);

}  // namespace neurodetect

#endif  // NEURODETECT_DEEPSIC_HPP_
