#pragma once

#include <cstdint>
#include <cmath>

#include "qso/common.hpp"

namespace qso {

// Counter-based splittable generator. Each output is the splitmix64 finalizer
// applied to key + i*golden, so the sequence for a given (seed, stream) pair is
// a pure function of the counter: reproducible across runs, platforms and
// thread schedules. child(k) derives a statistically independent stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive(mix(seed + kGolden), stream)) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // uniform [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_coin() { return (next_u64() >> 63) != 0; }

  // unbiased uniform over {0, ..., n-1}
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t lo = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= lo) return x % n;
    }
  }

  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Box-Muller; u clamped away from 0 so log stays finite.
    double u = next_double();
    if (u <= 0x1.0p-60) u = 0x1.0p-60;
    const double v = next_double();
    const double rad = std::sqrt(-2.0 * std::log(u));
    const double ang = 2.0 * M_PI * v;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  Vec gaussian_vec(Eigen::Index d) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = next_gaussian();
    return v;
  }

  // Uniformly distributed unit vector.
  Vec unit_vec(Eigen::Index d) {
    for (;;) {
      Vec v = gaussian_vec(d);
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

  Rng child(std::uint64_t stream) const {
    Rng c(*this);
    c.key_ = derive(key_, stream);
    c.counter_ = 0;
    c.has_spare_ = false;
    return c;
  }

  // std::uniform_random_bit_generator adapter (for std distributions).
  struct Engine {
    Rng* rng;
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return rng->next_u64(); }
  };
  Engine engine() { return Engine{this}; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t derive(std::uint64_t key, std::uint64_t stream) {
    return mix(key ^ mix(stream + 2 * kGolden));
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qso
