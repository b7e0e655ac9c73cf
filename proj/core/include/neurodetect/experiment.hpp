#ifndef NEURODETECT_EXPERIMENT_HPP_
#define NEURODETECT_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace neurodetect {

enum class ChannelFamily { isi_awgn, isi_poisson, mimo_awgn, mimo_poisson };

// Everything a Monte-Carlo sweep needs. Parsed from a flat `key = value`
// config file; keys match the field names below (see README).
struct ExperimentConfig {
  ChannelFamily channel = ChannelFamily::isi_awgn;
  std::string constellation;  // "bpsk" or "ook"; defaults per channel family
  int memory = 4;             // l, finite-memory channels
  int users = 4;              // K, MIMO channels
  int antennas = 4;           // n_r
  std::vector<std::string> detectors;
  std::vector<double> snr_db;
  int n_train = 5000;
  int n_test = 25000;
  int n_channels = 20;  // gamma-grid size, finite-memory only
  double gamma_min = 0.1;
  double gamma_max = 2.0;
  double sigma_e2 = 0.0;  // CSI error variance; 0 = perfect CSI
  int q_iterations = 5;   // SIC/DeepSIC iteration count
  std::uint64_t seed = 1;
  std::string out;        // CSV output path
  int block_length = 1000;

  void validate() const;  // throws std::invalid_argument naming the bad field
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct SerRow {
  std::string detector;
  double snr_db = 0.0;
  double ser = 0.0;
  double stderr_ = 0.0;  // sqrt(ser*(1-ser)/n)
  long n_symbols = 0;
  long n_errors = 0;
  std::uint64_t seed = 0;
};

struct SerCurve {
  std::vector<SerRow> rows;
};

// Fraction of mismatched positions. Lengths must match and be >= 1.
double ser(const std::vector<int>& decided, const std::vector<int>& truth);

// Runs the configured Monte-Carlo sweep: per channel realization and SNR,
// generates training data, trains the data-driven detectors, evaluates every
// detector on fresh test symbols, and aggregates errors across realizations.
// Under CSI uncertainty (sigma_e2 > 0) model-based detectors receive the
// perturbed channel and data-driven training data comes from the perturbed
// channel, while all testing uses the true channel. Deterministic given the
// master seed. If cfg.out is nonempty, writes the CSV and a companion
// plot script next to it.
SerCurve run_sweep(const ExperimentConfig& cfg);

std::string format_csv(const ExperimentConfig& cfg, const SerCurve& curve);
void write_sweep_outputs(const ExperimentConfig& cfg, const SerCurve& curve);

struct OracleReport {
  bool passed = false;
  std::string text;
};

// Named brute-force equivalence suites: "viterbi-exhaustive",
// "bcjr-marginals", "sic-map", "plugin-consistency", or "all".
OracleReport oracle_check(const std::string& suite);

}  // namespace neurodetect

#endif  // NEURODETECT_EXPERIMENT_HPP_
