#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "neurodetect/bcjr.hpp"
#include "neurodetect/channel.hpp"
#include "neurodetect/channel_likelihood.hpp"
#include "neurodetect/deepsic.hpp"
#include "neurodetect/experiment.hpp"
#include "neurodetect/likelihood_model.hpp"
#include "neurodetect/sic.hpp"
#include "neurodetect/viterbi.hpp"

namespace neurodetect {

namespace {

// Stream purposes inside one (realization, snr) cell. Purpose 0 is reserved
// for the per-realization CSI draw (used with snr index 0), so training and
// test data can never share a stream with it or with each other.
enum StreamPurpose : std::uint64_t {
  kCsiStream = 0,
  kTrainStream = 1,
  kTestStream = 2,
  kTrainSeed = 3,
};

std::uint64_t stream_id(int realization, int n_snr, int snr_idx, StreamPurpose p) {
  return (static_cast<std::uint64_t>(realization) * static_cast<std::uint64_t>(n_snr) +
          static_cast<std::uint64_t>(snr_idx)) *
             8 +
         p;
}

NoiseKind noise_kind(ChannelFamily family) {
  return (family == ChannelFamily::isi_poisson || family == ChannelFamily::mimo_poisson)
             ? NoiseKind::poisson
             : NoiseKind::awgn;
}

bool is_mimo(ChannelFamily family) {
  return family == ChannelFamily::mimo_awgn || family == ChannelFamily::mimo_poisson;
}

Constellation make_constellation(const ExperimentConfig& cfg) {
  return cfg.constellation == "ook" ? Constellation::ook() : Constellation::bpsk();
}

Eigen::MatrixXd spatial_decay_gains(int antennas, int users) {
  Eigen::MatrixXd gains(antennas, users);
  for (int i = 0; i < antennas; ++i) {
    for (int k = 0; k < users; ++k) {
      gains(i, k) = std::exp(-std::abs(i - k));
    }
  }
  return gains;
}

struct CellResult {
  std::vector<long> errors;  // per detector, cfg order
  long symbols = 0;
};

long mismatches(const std::vector<int>& a, const std::vector<int>& b) {
  long count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    count += a[i] != b[i];
  }
  return count;
}

bool wants_likelihood_model(const ExperimentConfig& cfg) {
  for (const auto& d : cfg.detectors) {
    if (d == "viterbinet" || d == "bcjrnet") {
      return true;
    }
  }
  return false;
}

Eigen::VectorXd finite_taps_used(const ExperimentConfig& cfg,
                                 const Eigen::VectorXd& taps_true, int realization) {
  if (cfg.sigma_e2 <= 0.0) {
    return taps_true;
  }
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  RngStream csi_rng(cfg.seed, stream_id(realization, n_snr, 0, kCsiStream));
  return perturb_csi_finite(taps_true, cfg.sigma_e2, csi_rng);
}

// Under CSI uncertainty the per-SNR model is trained once on data pooled
// evenly across the noisy channel variants: the receiver sees a variety of
// channel conditions rather than committing to any single wrong tap vector.
LikelihoodModel train_pooled_model(const ExperimentConfig& cfg,
                                   const Constellation& cons,
                                   const std::vector<double>& gammas, int snr_idx) {
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const int n_real = static_cast<int>(gammas.size());
  const double rho = std::pow(10.0, cfg.snr_db[static_cast<std::size_t>(snr_idx)] / 10.0);
  const NoiseKind kind = noise_kind(cfg.channel);
  Dataset pooled;
  for (int r = 0; r < n_real; ++r) {
    const Eigen::VectorXd taps_true =
        make_decay_vector(gammas[static_cast<std::size_t>(r)], cfg.memory);
    const FiniteMemoryChannel ch_used(kind, finite_taps_used(cfg, taps_true, r), rho);
    const int share = cfg.n_train / n_real + (r < cfg.n_train % n_real ? 1 : 0);
    RngStream train_rng(cfg.seed, stream_id(r, n_snr, snr_idx, kTrainStream));
    Dataset part = generate_dataset(ch_used, cons, share, train_rng);
    for (std::size_t i = 0; i < part.size(); ++i) {
      pooled.labels.push_back(std::move(part.labels[i]));
      pooled.observations.push_back(std::move(part.observations[i]));
    }
  }
  TrainConfig tc;
  tc.seed = RngStream(cfg.seed, stream_id(0, n_snr, snr_idx, kTrainSeed)).next_u64();
  return train_likelihood_model(pooled, cfg.memory, cons.size(), tc);
}

CellResult run_finite_cell(const ExperimentConfig& cfg, const Constellation& cons,
                           double gamma, int realization, int snr_idx,
                           const LikelihoodModel* shared_model) {
  const int l = cfg.memory;
  const int m = cons.size();
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const double rho = std::pow(10.0, cfg.snr_db[static_cast<std::size_t>(snr_idx)] / 10.0);
  const NoiseKind kind = noise_kind(cfg.channel);

  const Eigen::VectorXd taps_true = make_decay_vector(gamma, l);
  const FiniteMemoryChannel ch_true(kind, taps_true, rho);
  const FiniteMemoryChannel ch_used(kind, finite_taps_used(cfg, taps_true, realization),
                                    rho);

  const bool need_model = wants_likelihood_model(cfg);
  LikelihoodModel own_model;
  const LikelihoodModel* model = shared_model;
  if (need_model && model == nullptr) {
    // perfect-CSI protocol: a fresh model per (realization, snr), trained on
    // data from the same channel the test block uses
    RngStream train_rng(cfg.seed, stream_id(realization, n_snr, snr_idx, kTrainStream));
    const Dataset train_data = generate_dataset(ch_used, cons, cfg.n_train, train_rng);
    TrainConfig tc;
    tc.seed = RngStream(cfg.seed, stream_id(realization, n_snr, snr_idx, kTrainSeed))
                  .next_u64();
    own_model = train_likelihood_model(train_data, l, m, tc);
    model = &own_model;
  }

  const CostFn model_cost = exact_cost(ch_used, cons);
  const FunctionNodeFn model_node = exact_function_node(ch_used, cons);
  CostFn net_cost;
  FunctionNodeFn net_node;
  if (need_model) {
    net_cost = learned_cost(*model);
    net_node = learned_function_node(*model);
  }

  CellResult result;
  result.errors.assign(cfg.detectors.size(), 0);
  RngStream test_rng(cfg.seed, stream_id(realization, n_snr, snr_idx, kTestStream));
  const int n_blocks = (cfg.n_test + cfg.block_length - 1) / cfg.block_length;
  for (int b = 0; b < n_blocks; ++b) {
    const SymbolBlock block = transmit_block(ch_true, cons, cfg.block_length, test_rng);
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
      const std::string& name = cfg.detectors[d];
      std::vector<int> decided;
      if (name == "viterbi") {
        decided = viterbi(block.observations, model_cost, l, m, ViterbiMode::traceback);
      } else if (name == "viterbi_seq") {
        decided = viterbi(block.observations, model_cost, l, m, ViterbiMode::sequential);
      } else if (name == "bcjr") {
        decided = decide(bcjr(block.observations, model_node, l, m));
      } else if (name == "viterbinet") {
        decided = viterbi(block.observations, net_cost, l, m, ViterbiMode::traceback);
      } else if (name == "bcjrnet") {
        decided = decide(bcjr(block.observations, net_node, l, m));
      } else {
        throw std::invalid_argument("run_sweep: unknown detector '" + name + "'");
      }
      result.errors[d] += mismatches(decided, block.symbols);
    }
    result.symbols += cfg.block_length;
  }
  return result;
}

CellResult run_mimo_cell(const ExperimentConfig& cfg, const Constellation& cons,
                         int snr_idx) {
  const int m = cons.size();
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const double noise_var =
      std::pow(10.0, -cfg.snr_db[static_cast<std::size_t>(snr_idx)] / 10.0);
  const NoiseKind kind = noise_kind(cfg.channel);

  const Eigen::MatrixXd gains_true = spatial_decay_gains(cfg.antennas, cfg.users);
  Eigen::MatrixXd gains_used = gains_true;
  if (cfg.sigma_e2 > 0.0) {
    RngStream csi_rng(cfg.seed, stream_id(0, n_snr, 0, kCsiStream));
    gains_used = perturb_csi_mimo(gains_true, cfg.sigma_e2, csi_rng);
  }
  const MimoChannel ch_true(kind, gains_true, noise_var);
  const MimoChannel ch_used(kind, gains_used, noise_var);

  bool need_training = false;
  for (const auto& d : cfg.detectors) {
    need_training |= d == "deepsic_e2e" || d == "deepsic_seq";
  }
  Dataset train_data;
  if (need_training) {
    RngStream train_rng(cfg.seed, stream_id(0, n_snr, snr_idx, kTrainStream));
    train_data = generate_dataset(ch_used, cons, cfg.n_train, train_rng);
  }
  const std::uint64_t train_seed =
      RngStream(cfg.seed, stream_id(0, n_snr, snr_idx, kTrainSeed)).next_u64();

  std::vector<DeepSicNet> nets(cfg.detectors.size());
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    const std::string& name = cfg.detectors[d];
    if (name == "deepsic_e2e") {
      nets[d] = make_deepsic_net(cfg.users, cfg.antennas, m, cfg.q_iterations,
                                 DeepSicArch::end_to_end, train_seed + d);
      DeepSicTrainOptions opts;
      opts.base.seed = train_seed + d;
      deepsic_train_e2e(nets[d], train_data, opts);
    } else if (name == "deepsic_seq") {
      nets[d] = make_deepsic_net(cfg.users, cfg.antennas, m, cfg.q_iterations,
                                 DeepSicArch::sequential, train_seed + d);
      TrainConfig tc;
      tc.seed = train_seed + d;
      deepsic_train_seq(nets[d], train_data, tc);
    }
  }

  const MimoLogScoreFn map_score = exact_mimo_log_score(ch_used, cons);

  CellResult result;
  result.errors.assign(cfg.detectors.size(), 0);
  RngStream test_rng(cfg.seed, stream_id(0, n_snr, snr_idx, kTestStream));
  const Dataset test_data = generate_dataset(ch_true, cons, cfg.n_test, test_rng);
  for (std::size_t i = 0; i < test_data.size(); ++i) {
    const Eigen::VectorXd& y = test_data.observations[i];
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
      const std::string& name = cfg.detectors[d];
      std::vector<int> decided;
      if (name == "map") {
        decided = map_mimo_brute(y, map_score, cfg.users, m);
      } else if (name == "sic") {
        decided = iterative_sic(y, gains_used, noise_var, cons, cfg.q_iterations);
      } else {
        decided = deepsic_detect(nets[d], y);
      }
      for (int k = 0; k < cfg.users; ++k) {
        result.errors[d] +=
            decided[static_cast<std::size_t>(k)] != test_data.labels[i][static_cast<std::size_t>(k)];
      }
    }
  }
  result.symbols = static_cast<long>(test_data.size()) * cfg.users;
  return result;
}

}  // namespace

double ser(const std::vector<int>& decided, const std::vector<int>& truth) {
  if (decided.size() != truth.size() || decided.empty()) {
    throw std::invalid_argument("ser: sequences must have equal nonzero length");
  }
  return static_cast<double>(mismatches(decided, truth)) /
         static_cast<double>(decided.size());
}

SerCurve run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Constellation cons = make_constellation(cfg);
  const bool mimo = is_mimo(cfg.channel);
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const int n_real = mimo ? 1 : cfg.n_channels;

  std::vector<double> gammas(static_cast<std::size_t>(n_real), 0.0);
  if (!mimo) {
    for (int r = 0; r < n_real; ++r) {
      gammas[static_cast<std::size_t>(r)] =
          n_real == 1 ? cfg.gamma_min
                      : cfg.gamma_min + (cfg.gamma_max - cfg.gamma_min) * r / (n_real - 1);
    }
  }

  // Under CSI uncertainty the data-driven model is shared across
  // realizations: one per SNR, trained on the pooled noisy-channel variants.
  std::vector<LikelihoodModel> shared_models;
  const bool pooled = !mimo && cfg.sigma_e2 > 0.0 && wants_likelihood_model(cfg);
  if (pooled) {
    shared_models.resize(static_cast<std::size_t>(n_snr));
    std::atomic<int> next_model{0};
    auto trainer = [&]() {
      for (;;) {
        const int j = next_model.fetch_add(1);
        if (j >= n_snr) {
          return;
        }
        shared_models[static_cast<std::size_t>(j)] =
            train_pooled_model(cfg, cons, gammas, j);
      }
    };
    std::vector<std::thread> trainers;
    const int n_trainers = std::max(1, std::min<int>(
        static_cast<int>(std::thread::hardware_concurrency()), n_snr));
    for (int i = 1; i < n_trainers; ++i) {
      trainers.emplace_back(trainer);
    }
    trainer();
    for (auto& th : trainers) {
      th.join();
    }
  }

  // independent (realization, snr) cells, reduced in deterministic order
  const int n_cells = n_real * n_snr;
  std::vector<CellResult> cells(static_cast<std::size_t>(n_cells));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int cell = next.fetch_add(1);
      if (cell >= n_cells) {
        return;
      }
      const int r = cell / n_snr;
      const int j = cell % n_snr;
      cells[static_cast<std::size_t>(cell)] =
          mimo ? run_mimo_cell(cfg, cons, j)
               : run_finite_cell(cfg, cons, gammas[static_cast<std::size_t>(r)], r, j,
                                 pooled ? &shared_models[static_cast<std::size_t>(j)]
                                        : nullptr);
    }
  };
  const int n_threads = std::max(1, std::min<int>(
      static_cast<int>(std::thread::hardware_concurrency()), n_cells));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }

  SerCurve curve;
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    for (int j = 0; j < n_snr; ++j) {
      long errors = 0;
      long symbols = 0;
      for (int r = 0; r < n_real; ++r) {
        const CellResult& cell = cells[static_cast<std::size_t>(r * n_snr + j)];
        errors += cell.errors[d];
        symbols += cell.symbols;
      }
      SerRow row;
      row.detector = cfg.detectors[d];
      row.snr_db = cfg.snr_db[static_cast<std::size_t>(j)];
      row.n_errors = errors;
      row.n_symbols = symbols;
      row.ser = static_cast<double>(errors) / static_cast<double>(symbols);
      row.stderr_ = std::sqrt(row.ser * (1.0 - row.ser) / static_cast<double>(symbols));
      row.seed = cfg.seed;
      curve.rows.push_back(std::move(row));
    }
  }

  if (!cfg.out.empty()) {
    write_sweep_outputs(cfg, curve);
  }
  return curve;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

const char* family_name(ChannelFamily family) {
  switch (family) {
    case ChannelFamily::isi_awgn: return "isi_awgn";
    case ChannelFamily::isi_poisson: return "isi_poisson";
    case ChannelFamily::mimo_awgn: return "mimo_awgn";
    case ChannelFamily::mimo_poisson: return "mimo_poisson";
  }
  return "?";
}

}  // namespace

std::string format_csv(const ExperimentConfig& cfg, const SerCurve& curve) {
  std::ostringstream out;
  out << "# channel=" << family_name(cfg.channel)
      << " constellation=" << cfg.constellation;
  if (is_mimo(cfg.channel)) {
    out << " users=" << cfg.users << " antennas=" << cfg.antennas;
  } else {
    out << " memory=" << cfg.memory << " n_channels=" << cfg.n_channels
        << " gamma=[" << fmt_double(cfg.gamma_min) << "," << fmt_double(cfg.gamma_max)
        << "]" << " block_length=" << cfg.block_length;
  }
  out << "\n";
  out << "# n_train=" << cfg.n_train << " n_test=" << cfg.n_test
      << " sigma_e2=" << fmt_double(cfg.sigma_e2) << " q_iterations=" << cfg.q_iterations
      << " seed=" << cfg.seed << "\n";
  out << "detector,snr_db,ser,stderr,n_symbols,n_errors,seed\n";
  for (const auto& row : curve.rows) {
    out << row.detector << "," << fmt_double(row.snr_db) << "," << fmt_double(row.ser)
        << "," << fmt_double(row.stderr_) << "," << row.n_symbols << ","
        << row.n_errors << "," << row.seed << "\n";
  }
  return out.str();
}

void write_sweep_outputs(const ExperimentConfig& cfg, const SerCurve& curve) {
  {
    std::ofstream out(cfg.out, std::ios::binary);  // binary keeps LF endings
    if (!out) {
      throw std::runtime_error("run_sweep: cannot open output '" + cfg.out + "'");
    }
    out << format_csv(cfg, curve);
  }
  const std::string plot_path = cfg.out + ".plot.py";
  std::ofstream plot(plot_path, std::ios::binary);
  if (!plot) {
    throw std::runtime_error("run_sweep: cannot open output '" + plot_path + "'");
  }
  plot << "#!/usr/bin/env python3\n"
          "# Renders the SER curves written alongside this script.\n"
          "import csv\n"
          "from collections import defaultdict\n"
          "import matplotlib.pyplot as plt\n"
          "\n"
          "curves = defaultdict(list)\n"
          "with open("
       << "\"" << cfg.out << "\""
       << ") as fh:\n"
          "    rows = (r for r in fh if not r.startswith(\"#\"))\n"
          "    for rec in csv.DictReader(rows):\n"
          "        curves[rec[\"detector\"]].append(\n"
          "            (float(rec[\"snr_db\"]), float(rec[\"ser\"])))\n"
          "for name, pts in curves.items():\n"
          "    pts.sort()\n"
          "    plt.semilogy([p[0] for p in pts], [p[1] for p in pts], marker=\"o\", label=name)\n"
          "plt.xlabel(\"SNR [dB]\")\n"
          "plt.ylabel(\"SER\")\n"
          "plt.grid(True, which=\"both\", alpha=0.3)\n"
          "plt.legend()\n"
          "plt.savefig("
       << "\"" << cfg.out << ".png\""
       << ", dpi=150, bbox_inches=\"tight\")\n";
}

}  // namespace neurodetect
