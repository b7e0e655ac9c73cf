#ifndef NEURODETECT_CHANNEL_HPP_
#define NEURODETECT_CHANNEL_HPP_

#include <Eigen/Dense>
#include <vector>

#include "neurodetect/constellation.hpp"
#include "neurodetect/rng.hpp"

namespace neurodetect {

enum class NoiseKind { awgn, poisson };

// Finite-memory stationary causal channel: the output at time i depends only
// on the last `memory` inputs through the tap vector and the noise kind.
struct FiniteMemoryChannel {
  NoiseKind kind = NoiseKind::awgn;
  Eigen::VectorXd taps;  // length = memory, taps(0) weights the current symbol
  double snr = 1.0;      // linear scale, > 0

  FiniteMemoryChannel(NoiseKind kind, Eigen::VectorXd taps, double snr);
  int memory() const { return static_cast<int>(taps.size()); }
};

// Memoryless multiuser MIMO channel: y = f(H s) with AWGN or per-antenna
// Poisson counting noise.
struct MimoChannel {
  NoiseKind kind = NoiseKind::awgn;
  Eigen::MatrixXd gains;  // n_r x K
  double noise_var = 1.0;  // sigma_w^2, > 0

  MimoChannel(NoiseKind kind, Eigen::MatrixXd gains, double noise_var);
  int users() const { return static_cast<int>(gains.cols()); }
  int antennas() const { return static_cast<int>(gains.rows()); }
};

// Labeled input/output pairs. For finite-memory channels each label is the
// full length-l state window (current symbol first) and the observation is a
// length-1 vector; for MIMO channels the label is the K-user symbol vector
// and the observation has one entry per receive antenna.
struct Dataset {
  std::vector<std::vector<int>> labels;
  std::vector<Eigen::VectorXd> observations;

  std::size_t size() const { return labels.size(); }
};

// A contiguous transmission: the symbols actually sent (no warm-up prefix)
// and the corresponding channel outputs.
struct SymbolBlock {
  std::vector<int> symbols;
  Eigen::VectorXd observations;
};

// Exponentially decaying tap profile: entry tau (0-based) is e^(-gamma*tau).
Eigen::VectorXd make_decay_vector(double gamma, int length);

// Conditional mean of the channel output given the symbol window:
// sqrt(snr) * sum_tau taps(tau) * window(tau), window(0) = current symbol.
double isi_mean(const Eigen::VectorXd& window_values, const Eigen::VectorXd& taps,
                double snr);

double finite_memory_emit(const FiniteMemoryChannel& ch,
                          const Eigen::VectorXd& window_values, RngStream& rng);

Eigen::VectorXd mimo_emit(const MimoChannel& ch, const Eigen::VectorXd& symbol_values,
                          RngStream& rng);

// Adds i.i.d. N(0, error_var) noise to every tap.
Eigen::VectorXd perturb_csi_finite(const Eigen::VectorXd& taps, double error_var,
                                   RngStream& rng);

// Adds N(0, error_var * |H_ik|) noise to entry (i, k); zero entries stay zero.
Eigen::MatrixXd perturb_csi_mimo(const Eigen::MatrixXd& gains, double error_var,
                                 RngStream& rng);

// Transmits `length` i.i.d. uniform symbols through the channel. The first
// memory-1 outputs use a uniformly drawn phantom prefix so the block is a
// sample of the stationary model.
SymbolBlock transmit_block(const FiniteMemoryChannel& ch, const Constellation& cons,
                           int length, RngStream& rng);

Dataset generate_dataset(const FiniteMemoryChannel& ch, const Constellation& cons,
                         int count, RngStream& rng);

Dataset generate_dataset(const MimoChannel& ch, const Constellation& cons, int count,
                         RngStream& rng);

}  // namespace neurodetect

#endif  // NEURODETECT_CHANNEL_HPP_
