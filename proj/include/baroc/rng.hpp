#pragma once

#include <cstdint>
#include <cmath>

namespace baroc::rng {

// splitmix64 finalizer: full-avalanche 64-bit hash.
inline std::uint64_t finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Derives a child seed from (seed, tag). Chain calls to key draws by
// multiple indices, e.g. derive(derive(seed, t), packet).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return finalize(seed + 0x9e3779b97f4a7c15ULL * (tag + 0x632be59bd9b4e019ULL));
}

// Maps 64 random bits to [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small deterministic PRNG stream (splitmix64 sequence). The standard
// library distributions are implementation-defined, so all draws that must
// reproduce bit-exactly are hand-rolled here.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  double next_unit() { return to_unit(next_u64()); }

  // Uniform integer in [0, n); n must be > 0.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  double next_exponential(double mean) {
    double u = next_unit();
    return -mean * std::log1p(-u);
  }

  double next_normal(double mean, double std_dev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + std_dev * spare_;
    }
    double u1 = 1.0 - next_unit();  // (0, 1]
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + std_dev * r * std::cos(theta);
  }

  // Log-normal draw with the given arithmetic mean and log-space sigma.
  double next_lognormal(double mean, double sigma_log) {
    double mu = std::log(mean) - 0.5 * sigma_log * sigma_log;
    return std::exp(next_normal(mu, sigma_log));
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace baroc::rng
