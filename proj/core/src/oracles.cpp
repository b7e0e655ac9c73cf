#include "neurodetect/oracles.hpp"

#include <cmath>
#include <memory>

#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/trellis.hpp"

namespace neurodetect {

namespace {

long long checked_power(int m, int exponent) {
  long long count = 1;
  for (int i = 0; i < exponent; ++i) {
    count *= m;
    if (count > (1LL << 28)) {
      throw std::invalid_argument("exhaustive oracle: instance too large");
    }
  }
  return count;
}

std::vector<int> decode_assignment(long long code, int digits, int m) {
  std::vector<int> symbols(static_cast<std::size_t>(digits));
  for (auto& s : symbols) {
    s = static_cast<int>(code % m);
    code /= m;
  }
  return symbols;
}

// Window state (current symbol first) read out of a symbol assignment where
// index `offset + i` holds the symbol at time i.
int state_from_assignment(const std::vector<int>& symbols, int offset, int i, int l,
                          int m) {
  int state = 0;
  for (int tau = l - 1; tau >= 0; --tau) {
    state = state * m + symbols[static_cast<std::size_t>(offset + i - tau)];
  }
  return state;
}

}  // namespace

std::vector<int> exhaustive_min_cost_sequence(const Eigen::VectorXd& observations,
                                              const CostFn& cost, int l, int m) {
  const int t = static_cast<int>(observations.size());
  // l-1 phantom prefix symbols determine every observation window
  const int offset = l - 1;
  const long long count = checked_power(m, t + l - 1);
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<int> best_body;
  for (long long code = 0; code < count; ++code) {
    const std::vector<int> symbols = decode_assignment(code, t + l - 1, m);
    double total = 0.0;
    for (int i = 0; i < t; ++i) {
      total += cost(observations(i), state_from_assignment(symbols, offset, i, l, m));
    }
    if (total < best_total) {
      best_total = total;
      best_body.assign(symbols.begin() + offset, symbols.end());
    }
  }
  return best_body;
}

std::vector<SoftEstimate> exhaustive_marginals(const Eigen::VectorXd& observations,
                                               const FunctionNodeFn& node, int l,
                                               int m) {
  const int t = static_cast<int>(observations.size());
  // The chain's initial state spans l phantom symbols (the uniform prior
  // covers all m^l windows before the first observation), so enumerate all
  // of them; arbitrary node functions may read the whole previous window.
  const int offset = l;
  const long long count = checked_power(m, t + l);
  std::vector<SoftEstimate> mass(static_cast<std::size_t>(t), SoftEstimate::Zero(m));
  for (long long code = 0; code < count; ++code) {
    const std::vector<int> symbols = decode_assignment(code, t + l, m);
    double weight = 1.0;
    int prev_state = state_from_assignment(symbols, offset, -1, l, m);
    for (int i = 0; i < t && weight > 0.0; ++i) {
      const int state = state_from_assignment(symbols, offset, i, l, m);
      weight *= node(observations(i), state, prev_state);
      prev_state = state;
    }
    if (weight <= 0.0) {
      continue;
    }
    for (int i = 0; i < t; ++i) {
      mass[static_cast<std::size_t>(i)](symbols[static_cast<std::size_t>(offset + i)]) +=
          weight;
    }
  }
  for (auto& p : mass) {
    const double total = p.sum();
    if (!(total > 0.0)) {
      throw DegenerateEvidenceError("exhaustive_marginals: zero total mass");
    }
    p /= total;
  }
  return mass;
}

PosteriorFn analytic_posterior(const FiniteMemoryChannel& ch, const Constellation& cons) {
  auto cost = std::make_shared<CostFn>(exact_cost(ch, cons));
  const int n_states = trellis_state_count(cons.size(), ch.memory());
  return [cost, n_states](double y) {
    Eigen::VectorXd lik(n_states);
    for (int s = 0; s < n_states; ++s) {
      lik(s) = std::exp(-(*cost)(y, s));
    }
    return Eigen::VectorXd(lik / lik.sum());
  };
}

MarginalFn analytic_marginal(const FiniteMemoryChannel& ch, const Constellation& cons) {
  auto cost = std::make_shared<CostFn>(exact_cost(ch, cons));
  const int n_states = trellis_state_count(cons.size(), ch.memory());
  return [cost, n_states](double y) {
    double total = 0.0;
    for (int s = 0; s < n_states; ++s) {
      total += std::exp(-(*cost)(y, s));
    }
    return total / static_cast<double>(n_states);
  };
}

std::vector<int> map_two_user_awgn_reference(const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& gains,
                                             double noise_var,
                                             const Constellation& cons) {
  const int m = cons.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> decision{0, 0};
  for (int j0 = 0; j0 < m; ++j0) {
    for (int j1 = 0; j1 < m; ++j1) {
      const Eigen::VectorXd mean =
          gains.col(0) * cons.value(j0) + gains.col(1) * cons.value(j1);
      const double log_lik = -(y - mean).squaredNorm() / (2.0 * noise_var);
      if (log_lik > best) {
        best = log_lik;
        decision = {j0, j1};
      }
    }
  }
  return decision;
}

}  // namespace neurodetect
