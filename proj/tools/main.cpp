// Command-line front end: Monte-Carlo SER sweeps, detector training,
// file-based detection, and the brute-force oracle suites.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/deepsic.hpp"
#include "neurodetect/experiment.hpp"
#include "neurodetect/likelihood_model.hpp"
#include "neurodetect/model_io.hpp"
#include "neurodetect/sic.hpp"

namespace nd = neurodetect;

namespace {

void apply_seed_override(nd::ExperimentConfig& cfg) {
  if (const char* env = std::getenv("NEURODETECT_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
}

nd::Constellation config_constellation(const nd::ExperimentConfig& cfg) {
  return cfg.constellation == "ook" ? nd::Constellation::ook()
                                    : nd::Constellation::bpsk();
}

std::vector<Eigen::VectorXd> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open observations file: " + path);
  }
  std::vector<Eigen::VectorXd> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
    }
    Eigen::VectorXd row(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      row(static_cast<int>(i)) = values[i];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_sweep_cmd(const std::string& config_path, bool paper_scale, double csi_error,
                  const std::string& out_path) {
  nd::ExperimentConfig cfg = nd::parse_config_file(config_path);
  apply_seed_override(cfg);
  if (paper_scale) {
    cfg.n_test = 2 * cfg.n_test;  // desk-scale default halves the paper budget
  }
  if (csi_error >= 0.0) {
    cfg.sigma_e2 = csi_error;
  }
  cfg.out = out_path;
  const nd::SerCurve curve = nd::run_sweep(cfg);
  std::cout << nd::format_csv(cfg, curve);
  std::cout << "wrote " << cfg.out << " and " << cfg.out << ".plot.py\n";
  return 0;
}

int run_train_cmd(const std::string& config_path, const std::string& model_out) {
  nd::ExperimentConfig cfg = nd::parse_config_file(config_path);
  apply_seed_override(cfg);
  const nd::Constellation cons = config_constellation(cfg);
  const bool mimo = cfg.channel == nd::ChannelFamily::mimo_awgn ||
                    cfg.channel == nd::ChannelFamily::mimo_poisson;
  const double snr_db = cfg.snr_db.front();

  std::string detector;
  for (const auto& d : cfg.detectors) {
    if (d == "viterbinet" || d == "bcjrnet" || d == "deepsic_e2e" ||
        d == "deepsic_seq") {
      detector = d;
      break;
    }
  }
  if (detector.empty()) {
    std::cerr << "train: config lists no data-driven detector\n";
    return 1;
  }

  nd::SavedModel model;
  model.detector = detector;
  model.constellation = cons;
  nd::RngStream data_rng(cfg.seed, 1);
  nd::TrainConfig tc;
  tc.seed = cfg.seed;

  if (!mimo) {
    const auto kind = cfg.channel == nd::ChannelFamily::isi_poisson
                          ? nd::NoiseKind::poisson
                          : nd::NoiseKind::awgn;
    const nd::FiniteMemoryChannel ch(
        kind, nd::make_decay_vector(cfg.gamma_min, cfg.memory),
        std::pow(10.0, snr_db / 10.0));
    const nd::Dataset data = nd::generate_dataset(ch, cons, cfg.n_train, data_rng);
    model.kind = nd::ModelKind::likelihood;
    model.likelihood = nd::train_likelihood_model(data, cfg.memory, cons.size(), tc);
  } else {
    const auto kind = cfg.channel == nd::ChannelFamily::mimo_poisson
                          ? nd::NoiseKind::poisson
                          : nd::NoiseKind::awgn;
    Eigen::MatrixXd gains(cfg.antennas, cfg.users);
    for (int i = 0; i < cfg.antennas; ++i) {
      for (int k = 0; k < cfg.users; ++k) {
        gains(i, k) = std::exp(-std::abs(i - k));
      }
    }
    const nd::MimoChannel ch(kind, gains, std::pow(10.0, -snr_db / 10.0));
    const nd::Dataset data = nd::generate_dataset(ch, cons, cfg.n_train, data_rng);
    model.kind = nd::ModelKind::deepsic;
    if (detector == "deepsic_e2e") {
      model.deepsic = nd::make_deepsic_net(cfg.users, cfg.antennas, cons.size(),
                                           cfg.q_iterations,
                                           nd::DeepSicArch::end_to_end, cfg.seed);
      nd::DeepSicTrainOptions opts;
      opts.base = tc;
      nd::deepsic_train_e2e(model.deepsic, data, opts);
    } else {
      model.deepsic = nd::make_deepsic_net(cfg.users, cfg.antennas, cons.size(),
                                           cfg.q_iterations,
                                           nd::DeepSicArch::sequential, cfg.seed);
      nd::deepsic_train_seq(model.deepsic, data, tc);
    }
  }
  nd::save_model(model_out, model);
  std::cout << "trained " << detector << " at " << snr_db << " dB, wrote "
            << model_out << "\n";
  return 0;
}

int run_detect_cmd(const std::string& model_path, const std::string& in_path,
                   const std::string& out_path) {
  const nd::SavedModel model = nd::load_model(model_path);
  const auto observations = read_observations(in_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open decisions file: " + out_path);
  }

  if (model.kind == nd::ModelKind::likelihood) {
    Eigen::VectorXd block(static_cast<int>(observations.size()));
    for (std::size_t i = 0; i < observations.size(); ++i) {
      if (observations[i].size() != 1) {
        throw std::runtime_error("detect: expected one observation per line");
      }
      block(static_cast<int>(i)) = observations[i](0);
    }
    const std::vector<int> decided =
        model.detector == "bcjrnet"
            ? nd::bcjrnet_detect(model.likelihood, block)
            : nd::viterbinet_detect(model.likelihood, block);
    for (int s : decided) {
      out << s << "\n";
    }
  } else {
    for (const auto& y : observations) {
      const std::vector<int> decided = nd::deepsic_detect(model.deepsic, y);
      for (std::size_t k = 0; k < decided.size(); ++k) {
        out << decided[k] << (k + 1 < decided.size() ? "," : "");
      }
      out << "\n";
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol detection toolkit: model-based and data-driven receivers"};
  app.require_subcommand(1);

  std::string config_path, out_path, model_path, in_path, suite;
  bool paper_scale = false;
  double csi_error = -1.0;

  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo SER sweep");
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_flag("--paper-scale", paper_scale, "restore the full test budget");
  sweep->add_option("--csi-error", csi_error, "override the CSI error variance");
  sweep->add_option("--out", out_path, "output CSV path")->required();

  auto* train = app.add_subcommand("train", "Train a data-driven detector");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--model-out", model_path, "trained model path")->required();

  auto* detect = app.add_subcommand("detect", "Detect symbols from a file");
  detect->add_option("--model", model_path, "trained model path")->required();
  detect->add_option("--in", in_path, "observations CSV")->required();
  detect->add_option("--out", out_path, "decisions CSV")->required();

  auto* oracle = app.add_subcommand("oracle-check", "Run a brute-force oracle suite");
  oracle->add_option("--suite", suite, "viterbi-exhaustive | bcjr-marginals | sic-map | plugin-consistency | all")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      return run_sweep_cmd(config_path, paper_scale, csi_error, out_path);
    }
    if (train->parsed()) {
      return run_train_cmd(config_path, model_path);
    }
    if (detect->parsed()) {
      return run_detect_cmd(model_path, in_path, out_path);
    }
    if (oracle->parsed()) {
      const nd::OracleReport report = nd::oracle_check(suite);
      std::cout << report.text << "\n"
                << (report.passed ? "PASS" : "FAIL") << "\n";
      return report.passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
