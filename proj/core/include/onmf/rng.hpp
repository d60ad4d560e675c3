#pragma once

// Seeded random streams. Chain c under master seed m draws from
//   mt19937_64(splitmix64(m ^ splitmix64(c + 0x9E3779B97F4A7C15))),
// so streams are reproducible and independent of how chains are scheduled.

#include <cstdint>
#include <random>
#include <string>

namespace onmf {

/// One round of the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` under `master_seed`.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream);

class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng(derive_stream_seed(master_seed, stream));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1]; safe inside log().
  double uniform_positive() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  /// Engine and cached-normal state as text; restore() resumes the stream exactly.
  std::string state() const;
  void restore(const std::string& text);

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace onmf
