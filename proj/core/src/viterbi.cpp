#include "neurodetect/viterbi.hpp"

#include <limits>
#include <stdexcept>

#include "neurodetect/trellis.hpp"

namespace neurodetect {

std::vector<int> viterbi(const Eigen::VectorXd& observations, const CostFn& cost,
                         int l, int m, ViterbiMode mode) {
  const int t = static_cast<int>(observations.size());
  if (t <= l) {
    throw std::invalid_argument("viterbi: block length must exceed the memory");
  }
  const int n_states = trellis_state_count(m, l);
  const int stride = n_states / m;  // m^(l-1)

  std::vector<double> prev_cost(static_cast<std::size_t>(n_states), 0.0);
  std::vector<double> cur_cost(static_cast<std::size_t>(n_states), 0.0);
  const bool traceback = mode == ViterbiMode::traceback;
  std::vector<std::vector<int>> back;
  if (traceback) {
    back.assign(static_cast<std::size_t>(t),
                std::vector<int>(static_cast<std::size_t>(n_states), 0));
  }

  std::vector<int> decided(static_cast<std::size_t>(t), 0);

  for (int k = 0; k < t; ++k) {
    const double y = observations(k);
    for (int s = 0; s < n_states; ++s) {
      const int base = s / m;
      double best = std::numeric_limits<double>::infinity();
      int best_pred = 0;
      for (int oldest = 0; oldest < m; ++oldest) {
        const int u = base + oldest * stride;
        if (prev_cost[static_cast<std::size_t>(u)] < best) {
          best = prev_cost[static_cast<std::size_t>(u)];
          best_pred = u;
        }
      }
      cur_cost[static_cast<std::size_t>(s)] = best + cost(y, s);
      if (traceback) {
        back[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] = best_pred;
      }
    }
    if (!traceback && k + 1 >= l) {
      int best_state = 0;
      for (int s = 1; s < n_states; ++s) {
        if (cur_cost[static_cast<std::size_t>(s)] <
            cur_cost[static_cast<std::size_t>(best_state)]) {
          best_state = s;
        }
      }
      // position k+1-l carries the window's oldest symbol
      decided[static_cast<std::size_t>(k + 1 - l)] =
          state_symbol_at(best_state, m, l - 1);
      if (k == t - 1) {
        for (int tau = 0; tau < l; ++tau) {
          decided[static_cast<std::size_t>(t - 1 - tau)] =
              state_symbol_at(best_state, m, tau);
        }
      }
    }
    std::swap(prev_cost, cur_cost);
  }

  if (traceback) {
    int state = 0;
    for (int s = 1; s < n_states; ++s) {
      if (prev_cost[static_cast<std::size_t>(s)] <
          prev_cost[static_cast<std::size_t>(state)]) {
        state = s;
      }
    }
    for (int k = t - 1; k >= 0; --k) {
      decided[static_cast<std::size_t>(k)] = state_symbol(state, m);
      state = back[static_cast<std::size_t>(k)][static_cast<std::size_t>(state)];
    }
  }
  return decided;
}

}  // namespace neurodetect
