#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "ucompare/dataset.hpp"
#include "ucompare/designs.hpp"
#include "ucompare/learners.hpp"

namespace ucompare {

/// Difference-of-losses kernel for two learners at learning-set size g.
///
/// phi(learn; test) = L(M(learn)(x_test), y_test) - L(M'(learn)(x_test), y_test),
/// which lies in [-1, 1] because the loss lies in [0, 1].
class ComparisonKernel {
 public:
  /// Throws InvalidArgument if a learner is null or g == 0.
  ComparisonKernel(LearnerPtr learner_a, LearnerPtr learner_b, Loss loss, std::size_t g);

  const Learner& learner_a() const noexcept { return *a_; }
  const Learner& learner_b() const noexcept { return *b_; }
  const Loss& loss() const noexcept { return loss_; }
  std::size_t learning_size() const noexcept { return g_; }
  /// m = g + 1, the degree of the symmetrized kernel.
  std::size_t degree() const noexcept { return g_ + 1; }

  /// Fits both learners on `learn` once and writes phi(learn; t) for every t in
  /// `tests` to `out` (same length as tests).
  void phi_batch(const Dataset& data, std::span<const std::size_t> learn,
                 std::span<const std::size_t> tests, std::span<double> out) const;

  double phi(const Dataset& data, std::span<const std::size_t> learn, std::size_t test) const;

 private:
  LearnerPtr a_;
  LearnerPtr b_;
  Loss loss_;
  std::size_t g_;
};

double eval_phi(const ComparisonKernel& kernel, const Dataset& data, const OrderedSplit& split);

/// Cyclic symmetrization: the mean over members i of phi(subset \ {i}; i).
/// Requires |subset| = g + 1 and distinct indices.
double eval_phi0(const ComparisonKernel& kernel, const Dataset& data,
                 std::span<const std::size_t> subset);

/// phi0(indices[0..m)) * phi0(indices[m-c..2m-c)); the windows share exactly c
/// indices. Requires 1 <= c <= m and |indices| = 2m - c.
double eval_kappa_kernel(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                         std::span<const std::size_t> indices);

/// phi0(indices[0..m)) * phi0(indices[m..2m)). Requires |indices| = 2m.
double eval_theta2_kernel(const ComparisonKernel& kernel, const Dataset& data,
                          std::span<const std::size_t> indices);

/// Bounded least-recently-used map from an ascending index set to a phi0 value.
/// Not thread-safe; give each worker its own.
class PhiZeroCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 100'000;

  explicit PhiZeroCache(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

  const double* find(const std::vector<std::size_t>& key);
  void insert(std::vector<std::size_t> key, double value);

  std::size_t size() const noexcept { return index_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::size_t>& key) const noexcept;
  };
  using Entry = std::pair<std::vector<std::size_t>, double>;

  std::size_t capacity_;
  std::list<Entry> order_;  // most recent first
  std::unordered_map<std::vector<std::size_t>, std::list<Entry>::iterator, KeyHash> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// Kernel evaluation with phi0 memoized in a private cache (capacity 0 disables it).
/// One instance per worker.
class KernelEvaluator {
 public:
  KernelEvaluator(const ComparisonKernel& kernel, const Dataset& data,
                  std::size_t cache_capacity = PhiZeroCache::kDefaultCapacity);

  double phi0(std::span<const std::size_t> subset);
  double kappa(std::size_t c, std::span<const std::size_t> indices);
  double theta2(std::span<const std::size_t> indices);

  const PhiZeroCache& cache() const noexcept { return cache_; }

 private:
  const ComparisonKernel& kernel_;
  const Dataset& data_;
  PhiZeroCache cache_;
  std::vector<std::size_t> key_;
};

}  // namespace ucompare
