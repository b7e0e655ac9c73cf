#ifndef NEURODETECT_RNG_HPP_
#define NEURODETECT_RNG_HPP_

#include <cstdint>

namespace neurodetect {

// Counter-derived random stream: (master_seed, stream_id) fully determines the
// sample sequence, so parallel Monte-Carlo tasks stay independent and
// reproducible. The generator is xoshiro256++ whose state is filled from
// splitmix64 applied to finalize(master_seed) ^ finalize(stream_id); the exact
// derivation is documented in the README and must not change between releases.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on {0, 1, ..., n-1}, unbiased via rejection. Requires n >= 1.
  int uniform_int(int n);

  // Standard normal via Box-Muller; pairs are cached, so draws alternate
  // between consuming two uniforms and none.
  double gaussian();

  // Poisson draw by the product-of-uniforms method; exact for any rate > 0.
  // Large rates are split recursively so the e^-lambda bound never underflows.
  long poisson(double rate);

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace neurodetect

#endif  // NEURODETECT_RNG_HPP_
