#pragma once

#include <cstdint>
#include <random>

namespace temcodec {

// Deterministic uniform draws, independent of the standard library's
// distribution implementations so streams are reproducible everywhere.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

  // [0, 1)
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // [-1, 1)
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace temcodec
