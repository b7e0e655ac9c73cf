#ifndef NEURODETECT_MODEL_IO_HPP_
#define NEURODETECT_MODEL_IO_HPP_

#include <iosfwd>
#include <string>

#include "neurodetect/constellation.hpp"
#include "neurodetect/deepsic.hpp"
#include "neurodetect/likelihood_model.hpp"

namespace neurodetect {

// Binary, little-endian model container. Layout (documented in README):
//   magic "NDMODEL1\n", u8 payload kind, detector name (u32 length + bytes),
//   constellation (u32 m + f64 points), then the payload. MLP payloads are a
//   header (u32 layer count, u32 dims, u8 activation codes) followed by
//   row-major f64 weights and the bias vector, layer by layer.

enum class ModelKind : std::uint8_t { likelihood = 1, deepsic = 2 };

struct SavedModel {
  ModelKind kind = ModelKind::likelihood;
  std::string detector;  // e.g. "viterbinet", "bcjrnet", "deepsic_e2e"
  Constellation constellation = Constellation::bpsk();
  LikelihoodModel likelihood;  // valid when kind == likelihood
  DeepSicNet deepsic;          // valid when kind == deepsic
};

void save_mlp(std::ostream& out, const MlpSpec& spec, const MlpParams& params);
void load_mlp(std::istream& in, MlpSpec& spec, MlpParams& params);

void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

}  // namespace neurodetect

#endif  // NEURODETECT_MODEL_IO_HPP_
