#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace dsgm {

/// Seedable, splittable random stream.
///
/// All samplers in the library draw from this type so that a run is a pure
/// function of its seed. Child streams are derived by hashing (seed, index),
/// which lets concurrent trials use independent streams without sharing state.
/// Uniform and normal variates are generated from raw engine bits, so the
/// sequence does not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream for trial `index` of a run seeded with `master`.
  static Rng stream(std::uint64_t master, std::uint64_t index);

  /// Independent child stream. Does not advance this stream.
  Rng split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dsgm
