#pragma once

#include <cstdint>
#include <random>

namespace bigs {

// mt19937_64 with an explicit 53-bit uniform mapping, so that every random
// artifact is a pure function of the configured seed (the standard leaves
// distribution internals implementation-defined, the engine it pins down).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Independent stream for the k-th task under one master seed.
  static Rng forStream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace bigs
