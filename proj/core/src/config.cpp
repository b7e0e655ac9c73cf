#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "neurodetect/experiment.hpp"

namespace neurodetect {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    parts.push_back(trim(item));
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad integer value for '" + key + "'");
  }
}

// "a,b,c" or "start:step:stop" (inclusive stop, within half a step)
std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  std::vector<double> grid;
  if (value.find(':') != std::string::npos) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) {
      throw std::invalid_argument("config: '" + key + "' range needs start:step:stop");
    }
    const double start = parse_double(key, parts[0]);
    const double step = parse_double(key, parts[1]);
    const double stop = parse_double(key, parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument("config: bad range for '" + key + "'");
    }
    for (double v = start; v <= stop + step / 2; v += step) {
      grid.push_back(v);
    }
  } else {
    for (const auto& part : split(value, ',')) {
      if (!part.empty()) {
        grid.push_back(parse_double(key, part));
      }
    }
  }
  return grid;
}

const std::vector<std::string> kFiniteDetectors = {"viterbi", "viterbi_seq", "bcjr",
                                                   "viterbinet", "bcjrnet"};
const std::vector<std::string> kMimoDetectors = {"map", "sic", "deepsic_e2e",
                                                 "deepsic_seq"};

bool is_mimo(ChannelFamily family) {
  return family == ChannelFamily::mimo_awgn || family == ChannelFamily::mimo_poisson;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (snr_db.empty()) {
    throw std::invalid_argument("config: 'snr_db' must be nonempty");
  }
  if (n_test < 1) {
    throw std::invalid_argument("config: 'n_test' must be >= 1");
  }
  if (n_train < 1) {
    throw std::invalid_argument("config: 'n_train' must be >= 1");
  }
  if (detectors.empty()) {
    throw std::invalid_argument("config: 'detectors' must be nonempty");
  }
  if (constellation != "bpsk" && constellation != "ook") {
    throw std::invalid_argument("config: 'constellation' must be bpsk or ook");
  }
  if (memory < 1) {
    throw std::invalid_argument("config: 'memory' must be >= 1");
  }
  if (users < 1 || antennas < 1) {
    throw std::invalid_argument("config: 'users'/'antennas' must be >= 1");
  }
  if (n_channels < 1) {
    throw std::invalid_argument("config: 'n_channels' must be >= 1");
  }
  if (gamma_max < gamma_min) {
    throw std::invalid_argument("config: 'gamma_max' must be >= gamma_min");
  }
  if (sigma_e2 < 0.0) {
    throw std::invalid_argument("config: 'sigma_e2' must be >= 0");
  }
  if (q_iterations < 1) {
    throw std::invalid_argument("config: 'q_iterations' must be >= 1");
  }
  if (block_length < 1) {
    throw std::invalid_argument("config: 'block_length' must be >= 1");
  }
  const auto& known = is_mimo(channel) ? kMimoDetectors : kFiniteDetectors;
  for (const auto& d : detectors) {
    if (std::find(known.begin(), known.end(), d) == known.end()) {
      throw std::invalid_argument("config: 'detectors' has unknown entry '" + d + "'");
    }
  }
  const bool poisson =
      channel == ChannelFamily::isi_poisson || channel == ChannelFamily::mimo_poisson;
  if (poisson && constellation == "bpsk") {
    throw std::invalid_argument(
        "config: 'constellation' bpsk gives negative Poisson rates; use ook");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_constellation = false;
  std::stringstream ss(text);
  std::string raw;
  while (std::getline(ss, raw)) {
    const auto comment = raw.find('#');
    if (comment != std::string::npos) {
      raw = raw.substr(0, comment);
    }
    const std::string line = trim(raw);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "channel") {
      if (value == "isi_awgn") {
        cfg.channel = ChannelFamily::isi_awgn;
      } else if (value == "isi_poisson") {
        cfg.channel = ChannelFamily::isi_poisson;
      } else if (value == "mimo_awgn") {
        cfg.channel = ChannelFamily::mimo_awgn;
      } else if (value == "mimo_poisson") {
        cfg.channel = ChannelFamily::mimo_poisson;
      } else {
        throw std::invalid_argument("config: unknown channel '" + value + "'");
      }
    } else if (key == "constellation") {
      cfg.constellation = value;
      saw_constellation = true;
    } else if (key == "memory") {
      cfg.memory = static_cast<int>(parse_long(key, value));
    } else if (key == "users") {
      cfg.users = static_cast<int>(parse_long(key, value));
    } else if (key == "antennas") {
      cfg.antennas = static_cast<int>(parse_long(key, value));
    } else if (key == "detectors") {
      cfg.detectors = split(value, ',');
    } else if (key == "snr_db") {
      cfg.snr_db = parse_grid(key, value);
    } else if (key == "n_train") {
      cfg.n_train = static_cast<int>(parse_long(key, value));
    } else if (key == "n_test") {
      cfg.n_test = static_cast<int>(parse_long(key, value));
    } else if (key == "n_channels") {
      cfg.n_channels = static_cast<int>(parse_long(key, value));
    } else if (key == "gamma_min") {
      cfg.gamma_min = parse_double(key, value);
    } else if (key == "gamma_max") {
      cfg.gamma_max = parse_double(key, value);
    } else if (key == "sigma_e2") {
      cfg.sigma_e2 = parse_double(key, value);
    } else if (key == "q_iterations") {
      cfg.q_iterations = static_cast<int>(parse_long(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "block_length") {
      cfg.block_length = static_cast<int>(parse_long(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!saw_constellation) {
    const bool poisson = cfg.channel == ChannelFamily::isi_poisson ||
                         cfg.channel == ChannelFamily::mimo_poisson;
    cfg.constellation = poisson ? "ook" : "bpsk";
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace neurodetect
