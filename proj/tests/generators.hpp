#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "contactmoc/gas.hpp"

namespace contactmoc::testing {

// Seeded generator for property tests; every test owns its sequence.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  // Supersonic state with u - c >= margin and a moderate flow angle.
  PrimitiveState supersonic_state(const GasConstants& g, double margin = 0.2) {
    for (;;) {
      PrimitiveState s{uniform(1.2, 4.0), 0.0, uniform(0.4, 2.5), uniform(0.4, 2.5)};
      s.v = s.u * uniform(-0.3, 0.3);
      if (s.u - sound_speed(s, g) >= margin) return s;
    }
  }

  // Stream data through s with the reference pressure placed near s.p, inside
  // the admissible interval.
  StreamPoint stream_through(const PrimitiveState& s, const GasConstants& g) {
    StreamPoint sp{entropy_function(s, g), bernoulli(s, g), s.p};
    const double p_sonic = sonic_pressure(sp, g);
    sp.p_ref = std::min(s.p * uniform(0.8, 1.25), 0.5 * (s.p + p_sonic));
    return sp;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace contactmoc::testing
