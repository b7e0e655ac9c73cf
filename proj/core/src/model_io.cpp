#include "neurodetect/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace neurodetect {

namespace {

constexpr char kMagic[] = "NDMODEL1\n";

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint8_t read_u8(std::istream& in) {
  std::uint8_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double read_f64(std::istream& in) {
  double v = 0.0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  if (n > (1u << 20)) {
    throw std::runtime_error("model file: implausible string length");
  }
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) {
    write_f64(out, v(i));
  }
}

Eigen::VectorXd read_vector(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  Eigen::VectorXd v(static_cast<int>(n));
  for (std::uint32_t i = 0; i < n; ++i) {
    v(static_cast<int>(i)) = read_f64(in);
  }
  return v;
}

void write_gmm(std::ostream& out, const Gmm& g) {
  write_vector(out, g.weights);
  write_vector(out, g.means);
  write_vector(out, g.variances);
}

Gmm read_gmm(std::istream& in) {
  Gmm g;
  g.weights = read_vector(in);
  g.means = read_vector(in);
  g.variances = read_vector(in);
  return g;
}

}  // namespace

void save_mlp(std::ostream& out, const MlpSpec& spec, const MlpParams& params) {
  write_u32(out, static_cast<std::uint32_t>(spec.layer_dims.size()));
  for (int d : spec.layer_dims) {
    write_u32(out, static_cast<std::uint32_t>(d));
  }
  for (Activation a : spec.activations) {
    write_u8(out, static_cast<std::uint8_t>(a));
  }
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    const auto& w = params.weights[i];
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        write_f64(out, w(r, c));
      }
    }
    for (int r = 0; r < params.biases[i].size(); ++r) {
      write_f64(out, params.biases[i](r));
    }
  }
}

void load_mlp(std::istream& in, MlpSpec& spec, MlpParams& params) {
  const std::uint32_t n_dims = read_u32(in);
  if (n_dims < 2 || n_dims > 64) {
    throw std::runtime_error("model file: bad layer count");
  }
  spec.layer_dims.resize(n_dims);
  for (auto& d : spec.layer_dims) {
    d = static_cast<int>(read_u32(in));
  }
  spec.activations.resize(n_dims - 2);
  for (auto& a : spec.activations) {
    a = static_cast<Activation>(read_u8(in));
  }
  spec.validate();
  params.weights.clear();
  params.biases.clear();
  for (std::uint32_t i = 0; i + 1 < n_dims; ++i) {
    const int rows = spec.layer_dims[i + 1];
    const int cols = spec.layer_dims[i];
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        w(r, c) = read_f64(in);
      }
    }
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) {
      b(r) = read_f64(in);
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(std::move(b));
  }
}

void save_model(const std::string& path, const SavedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_model: cannot open " + path);
  }
  out.write(kMagic, sizeof(kMagic) - 1);
  write_u8(out, static_cast<std::uint8_t>(model.kind));
  write_string(out, model.detector);
  write_u32(out, static_cast<std::uint32_t>(model.constellation.size()));
  for (double p : model.constellation.points()) {
    write_f64(out, p);
  }
  if (model.kind == ModelKind::likelihood) {
    write_u32(out, static_cast<std::uint32_t>(model.likelihood.memory));
    write_u32(out, static_cast<std::uint32_t>(model.likelihood.symbols));
    write_gmm(out, model.likelihood.marginal);
    save_mlp(out, model.likelihood.spec, model.likelihood.params);
  } else {
    const DeepSicNet& net = model.deepsic;
    write_u32(out, static_cast<std::uint32_t>(net.users));
    write_u32(out, static_cast<std::uint32_t>(net.antennas));
    write_u32(out, static_cast<std::uint32_t>(net.symbols));
    write_u32(out, static_cast<std::uint32_t>(net.iterations()));
    for (const auto& column : net.blocks) {
      for (const auto& block : column) {
        save_mlp(out, net.block_spec, block);
      }
    }
  }
  if (!out) {
    throw std::runtime_error("save_model: write failed for " + path);
  }
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_model: cannot open " + path);
  }
  char magic[sizeof(kMagic) - 1];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("load_model: bad magic in " + path);
  }
  const auto kind = static_cast<ModelKind>(read_u8(in));
  const std::string detector = read_string(in);
  const std::uint32_t m = read_u32(in);
  std::vector<double> points(m);
  for (auto& p : points) {
    p = read_f64(in);
  }

  SavedModel model{kind, detector, Constellation(std::move(points)), {}, {}};
  if (kind == ModelKind::likelihood) {
    model.likelihood.memory = static_cast<int>(read_u32(in));
    model.likelihood.symbols = static_cast<int>(read_u32(in));
    model.likelihood.marginal = read_gmm(in);
    load_mlp(in, model.likelihood.spec, model.likelihood.params);
  } else if (kind == ModelKind::deepsic) {
    DeepSicNet& net = model.deepsic;
    net.users = static_cast<int>(read_u32(in));
    net.antennas = static_cast<int>(read_u32(in));
    net.symbols = static_cast<int>(read_u32(in));
    const int iterations = static_cast<int>(read_u32(in));
    net.blocks.resize(static_cast<std::size_t>(iterations));
    for (auto& column : net.blocks) {
      column.resize(static_cast<std::size_t>(net.users));
      for (auto& block : column) {
        load_mlp(in, net.block_spec, block);
      }
    }
  } else {
    throw std::runtime_error("load_model: unknown payload kind");
  }
  if (!in) {
    throw std::runtime_error("load_model: truncated file " + path);
  }
  return model;
}

}  // namespace neurodetect
