#include "neurodetect/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace neurodetect {

FiniteMemoryChannel::FiniteMemoryChannel(NoiseKind kind, Eigen::VectorXd taps, double snr)
    : kind(kind), taps(std::move(taps)), snr(snr) {
  if (this->taps.size() < 1) {
    throw std::invalid_argument("FiniteMemoryChannel: memory must be >= 1");
  }
  if (!(this->snr > 0.0)) {
    throw std::invalid_argument("FiniteMemoryChannel: snr must be > 0");
  }
}

MimoChannel::MimoChannel(NoiseKind kind, Eigen::MatrixXd gains, double noise_var)
    : kind(kind), gains(std::move(gains)), noise_var(noise_var) {
  if (this->gains.rows() < 1 || this->gains.cols() < 1) {
    throw std::invalid_argument("MimoChannel: gains matrix must be nonempty");
  }
  if (!(this->noise_var > 0.0)) {
    throw std::invalid_argument("MimoChannel: noise_var must be > 0");
  }
}

Eigen::VectorXd make_decay_vector(double gamma, int length) {
  if (length < 1) {
    throw std::invalid_argument("make_decay_vector: length must be >= 1");
  }
  Eigen::VectorXd taps(length);
  for (int tau = 0; tau < length; ++tau) {
    taps(tau) = std::exp(-gamma * static_cast<double>(tau));
  }
  return taps;
}

double isi_mean(const Eigen::VectorXd& window_values, const Eigen::VectorXd& taps,
                double snr) {
  if (window_values.size() != taps.size()) {
    throw std::invalid_argument("isi_mean: window/taps length mismatch");
  }
  return std::sqrt(snr) * taps.dot(window_values);
}

double finite_memory_emit(const FiniteMemoryChannel& ch,
                          const Eigen::VectorXd& window_values, RngStream& rng) {
  const double mean = isi_mean(window_values, ch.taps, ch.snr);
  if (ch.kind == NoiseKind::awgn) {
    return mean + rng.gaussian();
  }
  const double rate = mean + 1.0;
  if (!(rate > 0.0)) {
    throw std::invalid_argument("finite_memory_emit: nonpositive Poisson rate");
  }
  return static_cast<double>(rng.poisson(rate));
}

Eigen::VectorXd mimo_emit(const MimoChannel& ch, const Eigen::VectorXd& symbol_values,
                          RngStream& rng) {
  if (symbol_values.size() != ch.gains.cols()) {
    throw std::invalid_argument("mimo_emit: symbol vector length mismatch");
  }
  const Eigen::VectorXd mixed = ch.gains * symbol_values;
  Eigen::VectorXd out(ch.antennas());
  if (ch.kind == NoiseKind::awgn) {
    const double sigma = std::sqrt(ch.noise_var);
    for (int j = 0; j < out.size(); ++j) {
      out(j) = mixed(j) + sigma * rng.gaussian();
    }
  } else {
    const double scale = 1.0 / std::sqrt(ch.noise_var);
    for (int j = 0; j < out.size(); ++j) {
      const double rate = scale * mixed(j) + 1.0;
      if (!(rate > 0.0)) {
        throw std::invalid_argument("mimo_emit: nonpositive Poisson rate");
      }
      out(j) = static_cast<double>(rng.poisson(rate));
    }
  }
  return out;
}

Eigen::VectorXd perturb_csi_finite(const Eigen::VectorXd& taps, double error_var,
                                   RngStream& rng) {
  const double sigma = std::sqrt(error_var);
  Eigen::VectorXd noisy(taps.size());
  for (int i = 0; i < taps.size(); ++i) {
    noisy(i) = taps(i) + sigma * rng.gaussian();
  }
  return noisy;
}

Eigen::MatrixXd perturb_csi_mimo(const Eigen::MatrixXd& gains, double error_var,
                                 RngStream& rng) {
  Eigen::MatrixXd noisy(gains.rows(), gains.cols());
  for (int i = 0; i < gains.rows(); ++i) {
    for (int k = 0; k < gains.cols(); ++k) {
      const double sigma = std::sqrt(error_var * std::abs(gains(i, k)));
      noisy(i, k) = gains(i, k) + sigma * rng.gaussian();
    }
  }
  return noisy;
}

namespace {

// Draws prefix + body symbols and pushes them through the channel. The body
// windows reach back into the uniformly drawn phantom prefix, so every output
// is distributed per the stationary model.
struct Transmission {
  std::vector<int> prefix;   // memory-1 phantom symbols, oldest last
  std::vector<int> symbols;  // the body
  Eigen::VectorXd outputs;
};

Transmission run_channel(const FiniteMemoryChannel& ch, const Constellation& cons,
                         int length, RngStream& rng) {
  const int l = ch.memory();
  Transmission tx;
  tx.prefix.resize(static_cast<std::size_t>(l - 1));
  for (auto& s : tx.prefix) {
    s = rng.uniform_int(cons.size());
  }
  tx.symbols.resize(static_cast<std::size_t>(length));
  for (auto& s : tx.symbols) {
    s = rng.uniform_int(cons.size());
  }
  // symbol at body position i - tau (tau in [0, l)), falling back to prefix
  auto symbol_at = [&](int i, int tau) {
    const int j = i - tau;
    return j >= 0 ? tx.symbols[static_cast<std::size_t>(j)]
                  : tx.prefix[static_cast<std::size_t>(-j - 1)];
  };
  tx.outputs.resize(length);
  Eigen::VectorXd window(l);
  for (int i = 0; i < length; ++i) {
    for (int tau = 0; tau < l; ++tau) {
      window(tau) = cons.value(symbol_at(i, tau));
    }
    tx.outputs(i) = finite_memory_emit(ch, window, rng);
  }
  return tx;
}

}  // namespace

SymbolBlock transmit_block(const FiniteMemoryChannel& ch, const Constellation& cons,
                           int length, RngStream& rng) {
  Transmission tx = run_channel(ch, cons, length, rng);
  return SymbolBlock{std::move(tx.symbols), std::move(tx.outputs)};
}

Dataset generate_dataset(const FiniteMemoryChannel& ch, const Constellation& cons,
                         int count, RngStream& rng) {
  const int l = ch.memory();
  Transmission tx = run_channel(ch, cons, count, rng);
  Dataset data;
  data.labels.reserve(static_cast<std::size_t>(count));
  data.observations.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<int> window(static_cast<std::size_t>(l));
    for (int tau = 0; tau < l; ++tau) {
      const int j = i - tau;
      window[static_cast<std::size_t>(tau)] =
          j >= 0 ? tx.symbols[static_cast<std::size_t>(j)]
                 : tx.prefix[static_cast<std::size_t>(-j - 1)];
    }
    data.labels.push_back(std::move(window));
    data.observations.push_back(Eigen::VectorXd::Constant(1, tx.outputs(i)));
  }
  return data;
}

Dataset generate_dataset(const MimoChannel& ch, const Constellation& cons, int count,
                         RngStream& rng) {
  Dataset data;
  data.labels.reserve(static_cast<std::size_t>(count));
  data.observations.reserve(static_cast<std::size_t>(count));
  Eigen::VectorXd values(ch.users());
  for (int i = 0; i < count; ++i) {
    std::vector<int> label(static_cast<std::size_t>(ch.users()));
    for (int k = 0; k < ch.users(); ++k) {
      label[static_cast<std::size_t>(k)] = rng.uniform_int(cons.size());
      values(k) = cons.value(label[static_cast<std::size_t>(k)]);
    }
    data.observations.push_back(mimo_emit(ch, values, rng));
    data.labels.push_back(std::move(label));
  }
  return data;
}

}  // namespace neurodetect
