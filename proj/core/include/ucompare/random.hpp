#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace ucompare {

/// Identifier persisted in reports so that runs can be reproduced bit for bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-split/v1";

/// SplitMix64 finalizer, used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A seedable, splittable random stream.
///
/// Children are derived with split(), which hashes the parent's seed together
/// with a caller-chosen key, so the stream for (seed, key...) never depends on
/// how many values other streams consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child stream keyed by `key`.
  RandomStream split(std::uint64_t key) const noexcept;

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Uses rejection so the result is exactly uniform
  /// and identical across standard library implementations.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Draws ordered subsets of {0..n-1} by partial Fisher-Yates on a reusable buffer.
class OrderedSubsetSampler {
 public:
  explicit OrderedSubsetSampler(std::size_t n);

  /// Writes k distinct indices, uniform over all n!/(n-k)! ordered subsets, into out.
  void sample(RandomStream& rng, std::span<std::size_t> out);

  std::size_t population() const noexcept { return pool_.size(); }

 private:
  std::vector<std::size_t> pool_;
};

}  // namespace ucompare
