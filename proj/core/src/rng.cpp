#include "neurodetect/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace neurodetect {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t a = master_seed;
  std::uint64_t b = stream_id;
  std::uint64_t derived = splitmix64(a) ^ rotl(splitmix64(b), 32);
  for (auto& word : state_) {
    word = splitmix64(derived);
  }
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RngStream::uniform_int(int n) {
  if (n < 1) {
    throw std::invalid_argument("uniform_int: n must be >= 1");
  }
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t bound = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= bound);
  return static_cast<int>(x % un);
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

long RngStream::poisson(double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("poisson: rate must be > 0");
  }
  if (rate > 500.0) {
    // Superposition: Poisson(a + b) = Poisson(a) + Poisson(b).
    return poisson(rate / 2.0) + poisson(rate / 2.0);
  }
  const double limit = std::exp(-rate);
  long count = 0;
  double product = 1.0;
  do {
    ++count;
    product *= uniform();
  } while (product > limit);
  return count - 1;
}

}  // namespace neurodetect
