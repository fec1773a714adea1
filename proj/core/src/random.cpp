#include "ucompare/random.hpp"

#include <numeric>

#include "ucompare/errors.hpp"

namespace ucompare {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::split(std::uint64_t key) const noexcept {
  return RandomStream(splitmix64(seed_ ^ splitmix64(key + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: bound must be positive");
  // Largest multiple of bound that fits, minus one; values above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r < limit) return r % bound;
  }
}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

OrderedSubsetSampler::OrderedSubsetSampler(std::size_t n) : pool_(n) {
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
}

void OrderedSubsetSampler::sample(RandomStream& rng, std::span<std::size_t> out) {
  const std::size_t n = pool_.size();
  const std::size_t k = out.size();
  if (k > n) throw InvalidArgument("ordered subset larger than the population");
  // Partial Fisher-Yates. The pool holds some permutation left by earlier draws;
  // conditional on it the first k slots are still uniform over ordered subsets.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(pool_[i], pool_[j]);
    out[i] = pool_[i];
  }
}

}  // namespace ucompare
