#include "neurodetect/bcjr.hpp"

#include "neurodetect/trellis.hpp"

namespace neurodetect {

std::vector<SoftEstimate> bcjr(const Eigen::VectorXd& observations,
                               const FunctionNodeFn& node, int l, int m) {
  const int t = static_cast<int>(observations.size());
  if (t <= l) {
    throw std::invalid_argument("bcjr: block length must exceed the memory");
  }
  const int n_states = trellis_state_count(m, l);
  const int stride = n_states / m;

  // forward recursion, uniform prior over the time-0 window
  Eigen::MatrixXd alpha(n_states, t);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
  for (int k = 0; k < t; ++k) {
    const double y = observations(k);
    Eigen::VectorXd cur(n_states);
    for (int s = 0; s < n_states; ++s) {
      const int base = s / m;
      double acc = 0.0;
      for (int oldest = 0; oldest < m; ++oldest) {
        const int u = base + oldest * stride;
        acc += prev(u) * node(y, s, u);
      }
      cur(s) = acc;
    }
    const double total = cur.sum();
    if (!(total > 0.0)) {
      throw DegenerateEvidenceError("bcjr: forward message vanished at step " +
                                    std::to_string(k));
    }
    cur /= total;
    alpha.col(k) = cur;
    prev = cur;
  }

  // backward recursion
  Eigen::MatrixXd beta(n_states, t);
  Eigen::VectorXd next = Eigen::VectorXd::Ones(n_states);
  beta.col(t - 1) = next;
  for (int k = t - 1; k >= 1; --k) {
    const double y = observations(k);
    Eigen::VectorXd cur = Eigen::VectorXd::Zero(n_states);
    for (int s = 0; s < n_states; ++s) {
      const int base = s / m;
      const double contrib = next(s);
      for (int oldest = 0; oldest < m; ++oldest) {
        const int u = base + oldest * stride;
        cur(u) += contrib * node(y, s, u);
      }
    }
    const double total = cur.sum();
    if (!(total > 0.0)) {
      throw DegenerateEvidenceError("bcjr: backward message vanished at step " +
                                    std::to_string(k));
    }
    cur /= total;
    beta.col(k - 1) = cur;
    next = cur;
  }

  std::vector<SoftEstimate> posteriors;
  posteriors.reserve(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    Eigen::VectorXd symbol_mass = Eigen::VectorXd::Zero(m);
    for (int s = 0; s < n_states; ++s) {
      symbol_mass(state_symbol(s, m)) += alpha(s, k) * beta(s, k);
    }
    const double total = symbol_mass.sum();
    if (!(total > 0.0)) {
      throw DegenerateEvidenceError("bcjr: posterior vanished at step " +
                                    std::to_string(k));
    }
    posteriors.push_back(symbol_mass / total);
  }
  return posteriors;
}

std::vector<int> decide(const std::vector<SoftEstimate>& posteriors) {
  std::vector<int> out;
  out.reserve(posteriors.size());
  for (const auto& p : posteriors) {
    int best = 0;
    for (int j = 1; j < p.size(); ++j) {
      if (p(j) > p(best)) {
        best = j;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace neurodetect
