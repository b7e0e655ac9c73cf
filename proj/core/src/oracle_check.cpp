#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/experiment.hpp"
#include "neurodetect/oracles.hpp"
#include "neurodetect/sic.hpp"
#include "neurodetect/trellis.hpp"

namespace neurodetect {

namespace {

constexpr std::uint64_t kOracleSeed = 0x0facadeULL;

long count_mismatches(const std::vector<int>& a, const std::vector<int>& b) {
  long n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n += a[i] != b[i];
  }
  return n;
}

// Random per-time cost tables exercised through time-coded observations:
// the callable stays index-free, the test block supplies y = time index.
CostFn table_cost(std::shared_ptr<std::vector<Eigen::VectorXd>> tables) {
  return [tables](double y, int state) {
    return (*tables)[static_cast<std::size_t>(y)](state);
  };
}

OracleReport check_viterbi_exhaustive() {
  const int t = 6, m = 2;
  int matches = 0, total = 0;
  RngStream rng(kOracleSeed, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int l = 1 + trial % 3;
    const int n_states = trellis_state_count(m, l);
    auto tables = std::make_shared<std::vector<Eigen::VectorXd>>();
    for (int k = 0; k < t; ++k) {
      Eigen::VectorXd col(n_states);
      for (int s = 0; s < n_states; ++s) {
        col(s) = 10.0 * rng.uniform();
      }
      tables->push_back(col);
    }
    Eigen::VectorXd obs(t);
    for (int k = 0; k < t; ++k) {
      obs(k) = k;
    }
    const CostFn cost = table_cost(tables);
    const auto fast = viterbi(obs, cost, l, m, ViterbiMode::traceback);
    const auto brute = exhaustive_min_cost_sequence(obs, cost, l, m);
    matches += fast == brute;
    ++total;
  }
  std::ostringstream report;
  report << "viterbi-exhaustive: " << matches << "/" << total
         << " exact sequence matches (t=6, m=2, l in {1,2,3})";
  return {matches == total, report.str()};
}

OracleReport check_bcjr_marginals() {
  const int t = 6, m = 2;
  double worst = 0.0;
  RngStream rng(kOracleSeed, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int l = 1 + trial % 3;
    const int n_states = trellis_state_count(m, l);
    // random positive factors on consistent transitions, keyed by time code
    auto tables = std::make_shared<std::vector<Eigen::MatrixXd>>();
    for (int k = 0; k < t; ++k) {
      Eigen::MatrixXd factors(n_states, n_states);
      for (int s = 0; s < n_states; ++s) {
        for (int u = 0; u < n_states; ++u) {
          factors(s, u) = 0.05 + rng.uniform();
        }
      }
      tables->push_back(factors);
    }
    FunctionNodeFn node = [tables, l, m](double y, int state, int prev) {
      if (!shift_consistent(state, prev, m, l)) {
        return 0.0;
      }
      return (*tables)[static_cast<std::size_t>(y)](state, prev);
    };
    Eigen::VectorXd obs(t);
    for (int k = 0; k < t; ++k) {
      obs(k) = k;
    }
    const auto fast = bcjr(obs, node, l, m);
    const auto brute = exhaustive_marginals(obs, node, l, m);
    for (int k = 0; k < t; ++k) {
      worst = std::max(worst, (fast[static_cast<std::size_t>(k)] -
                               brute[static_cast<std::size_t>(k)])
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  }
  std::ostringstream report;
  report << "bcjr-marginals: max |posterior delta| = " << worst
         << " over 100 instances (tolerance 1e-9)";
  return {worst <= 1e-9, report.str()};
}

OracleReport check_sic_map() {
  const Constellation cons = Constellation::bpsk();
  RngStream rng(kOracleSeed, 3);
  long mismatched = 0;
  long total = 0;

  // K=1: SIC must reduce to the scalar MAP decision for any iteration count
  {
    Eigen::MatrixXd gains(2, 1);
    gains << 1.0, 0.4;
    const MimoChannel ch(NoiseKind::awgn, gains, 0.5);
    const MimoLogScoreFn score = exact_mimo_log_score(ch, cons);
    for (int trial = 0; trial < 2000; ++trial) {
      Eigen::VectorXd s(1);
      s(0) = cons.value(rng.uniform_int(2));
      const Eigen::VectorXd y = mimo_emit(ch, s, rng);
      for (int q : {1, 3}) {
        mismatched += iterative_sic(y, gains, ch.noise_var, cons, q) !=
                      map_mimo_brute(y, score, 1, 2);
        ++total;
      }
    }
  }

  // 2x2 identity channel: users decouple, SIC must match per-user MAP
  {
    const Eigen::MatrixXd gains = Eigen::MatrixXd::Identity(2, 2);
    const MimoChannel ch(NoiseKind::awgn, gains, 0.8);
    const MimoLogScoreFn score = exact_mimo_log_score(ch, cons);
    for (int trial = 0; trial < 5000; ++trial) {
      Eigen::VectorXd s(2);
      s(0) = cons.value(rng.uniform_int(2));
      s(1) = cons.value(rng.uniform_int(2));
      const Eigen::VectorXd y = mimo_emit(ch, s, rng);
      mismatched += iterative_sic(y, gains, ch.noise_var, cons, 3) !=
                    map_mimo_brute(y, score, 2, 2);
      ++total;
    }
  }

  std::ostringstream report;
  report << "sic-map: " << mismatched << "/" << total
         << " decision mismatches on decoupled instances (K <= 2)";
  return {mismatched == 0, report.str()};
}

OracleReport check_plugin_consistency() {
  const Constellation cons = Constellation::bpsk();
  const int l = 4, m = 2;
  const FiniteMemoryChannel ch(NoiseKind::awgn, make_decay_vector(0.5, l), 4.0);

  const CostFn exact = exact_cost(ch, cons);
  const CostFn plugin =
      bayes_cost(analytic_posterior(ch, cons), analytic_marginal(ch, cons), l, m);
  const FunctionNodeFn exact_node = exact_function_node(ch, cons);
  const FunctionNodeFn plugin_node = bayes_function_node(
      analytic_posterior(ch, cons), analytic_marginal(ch, cons), l, m);

  // cost agreement over a y grid covering the observable range
  double worst_cost = 0.0;
  const int n_states = trellis_state_count(m, l);
  for (double y = -8.0; y <= 8.0; y += 0.05) {
    for (int s = 0; s < n_states; ++s) {
      worst_cost = std::max(worst_cost, std::abs(exact(y, s) - plugin(y, s)));
    }
  }

  // decision agreement on channel blocks
  RngStream rng(kOracleSeed, 4);
  long mismatched = 0;
  long symbols = 0;
  for (int b = 0; b < 10; ++b) {
    const SymbolBlock block = transmit_block(ch, cons, 1000, rng);
    mismatched += count_mismatches(
        viterbi(block.observations, plugin, l, m, ViterbiMode::traceback),
        viterbi(block.observations, exact, l, m, ViterbiMode::traceback));
    mismatched += count_mismatches(decide(bcjr(block.observations, plugin_node, l, m)),
                                   decide(bcjr(block.observations, exact_node, l, m)));
    symbols += 2000;
  }

  std::ostringstream report;
  report << "plugin-consistency: max cost delta = " << worst_cost
         << " (tolerance 1e-9), " << mismatched << "/" << symbols
         << " decision mismatches";
  return {worst_cost <= 1e-9 && mismatched == 0, report.str()};
}

}  // namespace

OracleReport oracle_check(const std::string& suite) {
  if (suite == "viterbi-exhaustive") {
    return check_viterbi_exhaustive();
  }
  if (suite == "bcjr-marginals") {
    return check_bcjr_marginals();
  }
  if (suite == "sic-map") {
    return check_sic_map();
  }
  if (suite == "plugin-consistency") {
    return check_plugin_consistency();
  }
  if (suite == "all") {
    OracleReport combined{true, ""};
    for (const char* name :
         {"viterbi-exhaustive", "bcjr-marginals", "sic-map", "plugin-consistency"}) {
      const OracleReport r = oracle_check(name);
      combined.passed = combined.passed && r.passed;
      combined.text += r.text + "\n";
    }
    if (!combined.text.empty()) {
      combined.text.pop_back();
    }
    return combined;
  }
  throw std::invalid_argument("oracle_check: unknown suite '" + suite + "'");
}

}  // namespace neurodetect
