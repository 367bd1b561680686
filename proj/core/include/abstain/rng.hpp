#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace abstain {

/// Independent random streams derived from one master seed. Changing how one
/// consumer draws never perturbs the others.
enum class Stream : std::uint64_t {
  Nature = 1,
  Learner = 2,
  Adversary = 3,
  Instance = 4,
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seeded generator with platform-independent helpers. The standard library
/// distributions are implementation-defined, so draws are built directly on
/// the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t master_seed, Stream which);
  static Rng stream(std::uint64_t master_seed, std::uint64_t which);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace abstain
