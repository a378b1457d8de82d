#ifndef SONN_RANDOM_HPP
#define SONN_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sonn {

// Derives an independent stream seed from a base seed and up to two stream
// coordinates (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Random source with a bit-reproducible output sequence on every platform.
// std::mt19937_64 is fully specified by the standard; the distributions below
// are implemented here because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

  // Uniform integer on [0, n).
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sonn

#endif  // SONN_RANDOM_HPP
