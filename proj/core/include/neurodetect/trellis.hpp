#ifndef NEURODETECT_TRELLIS_HPP_
#define NEURODETECT_TRELLIS_HPP_

#include <span>
#include <stdexcept>
#include <vector>

namespace neurodetect {

// State encoding for the m^l symbol windows. A window lists the current
// symbol first: window[tau] = s[i - tau]. The state index packs the window
// base-m with the current symbol as the least significant digit:
//   state = sum_tau window[tau] * m^tau
// so two consecutive states are shift-consistent exactly when
//   state / m == prev % m^(l-1).

inline int trellis_state_count(int m, int l) {
  long long count = 1;
  for (int i = 0; i < l; ++i) {
    count *= m;
    if (count > (1LL << 30)) {
      throw std::invalid_argument("trellis_state_count: m^l too large");
    }
  }
  return static_cast<int>(count);
}

inline int encode_window(std::span<const int> window, int m) {
  int state = 0;
  for (std::size_t tau = window.size(); tau-- > 0;) {
    state = state * m + window[tau];
  }
  return state;
}

inline std::vector<int> decode_window(int state, int m, int l) {
  std::vector<int> window(static_cast<std::size_t>(l));
  for (int tau = 0; tau < l; ++tau) {
    window[static_cast<std::size_t>(tau)] = state % m;
    state /= m;
  }
  return window;
}

// Symbol index at lag tau inside the window encoded by `state`.
inline int state_symbol_at(int state, int m, int tau) {
  for (int i = 0; i < tau; ++i) {
    state /= m;
  }
  return state % m;
}

// The current (most recent) symbol of the window.
inline int state_symbol(int state, int m) { return state % m; }

inline bool shift_consistent(int state, int prev_state, int m, int l) {
  int stride = 1;
  for (int i = 0; i < l - 1; ++i) {
    stride *= m;
  }
  return state / m == prev_state % stride;
}

// Predecessor of `state` whose dropped (oldest) symbol is `oldest`.
inline int predecessor(int state, int oldest, int m, int l) {
  int stride = 1;
  for (int i = 0; i < l - 1; ++i) {
    stride *= m;
  }
  return state / m + oldest * stride;
}

}  // namespace neurodetect

#endif  // NEURODETECT_TRELLIS_HPP_
