#include "neurodetect/channel_likelihood.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "neurodetect/trellis.hpp"

namespace neurodetect {

namespace {

constexpr double kMaxCost = 27.631021115928547;  // -ln(kLikelihoodFloor)
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

Eigen::VectorXd state_means(const FiniteMemoryChannel& ch, const Constellation& cons) {
  const int l = ch.memory();
  const int m = cons.size();
  const int n_states = trellis_state_count(m, l);
  Eigen::VectorXd means(n_states);
  Eigen::VectorXd window(l);
  for (int s = 0; s < n_states; ++s) {
    for (int tau = 0; tau < l; ++tau) {
      window(tau) = cons.value(state_symbol_at(s, m, tau));
    }
    means(s) = isi_mean(window, ch.taps, ch.snr);
  }
  return means;
}

CostFn exact_cost(const FiniteMemoryChannel& ch, const Constellation& cons) {
  auto means = std::make_shared<Eigen::VectorXd>(state_means(ch, cons));
  if (ch.kind == NoiseKind::awgn) {
    return [means](double y, int state) {
      const double d = y - (*means)(state);
      return std::min(kHalfLog2Pi + 0.5 * d * d, kMaxCost);
    };
  }
  for (int s = 0; s < means->size(); ++s) {
    if (!((*means)(s) + 1.0 > 0.0)) {
      throw std::invalid_argument("exact_cost: nonpositive Poisson rate for some state");
    }
  }
  return [means](double y, int state) {
    const double rate = (*means)(state) + 1.0;
    const double cost = rate - y * std::log(rate) + std::lgamma(y + 1.0);
    return std::min(cost, kMaxCost);
  };
}

FunctionNodeFn exact_function_node(const FiniteMemoryChannel& ch,
                                   const Constellation& cons) {
  const int l = ch.memory();
  const int m = cons.size();
  const CostFn cost = exact_cost(ch, cons);
  return [cost, l, m](double y, int state, int prev_state) {
    if (!shift_consistent(state, prev_state, m, l)) {
      return 0.0;
    }
    return std::exp(-cost(y, state)) / static_cast<double>(m);
  };
}

}  // namespace neurodetect
