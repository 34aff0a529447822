#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tilt {

// Seeded RNG with hand-rolled distributions. libstdc++ distribution objects
// are implementation-defined, so uniform/normal/shuffle are written out here
// to keep every stream bit-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t bits() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive range
  int uniform_int(int lo, int hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(bits() % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal(double mean = 0.0, double stddev = 1.0) {
    // Box-Muller without the cached spare, one draw per call.
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * r * std::cos(6.283185307179586 * u2);
  }

  // Independent child stream; reproducible per (seed, stream id).
  Rng derive(uint64_t stream) const {
    return Rng(splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = bits() % i;
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace tilt
