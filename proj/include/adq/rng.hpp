#pragma once

#include <cstdint>
#include <random>

namespace adq {

// The one generator used everywhere. The raw stream is std::mt19937_64, whose
// output for a given seed is fixed by the C++ standard; uniform and normal
// variates are derived here rather than through <random> distributions, which
// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box–Muller; the second variate of each pair is cached.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Per-trial seed lineage: seed XOR index.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return seed ^ index;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace adq
