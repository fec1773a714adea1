#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ucompare/numeric.hpp"
#include "ucompare/random.hpp"

namespace ucompare {

/// Default cap on the number of subsets any full enumeration may visit.
inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

/// Learning indices plus one held-out test index (0-based internally).
struct OrderedSplit {
  std::vector<std::size_t> learn;
  std::size_t test = 0;

  friend bool operator==(const OrderedSplit&, const OrderedSplit&) = default;
};

/// Set of distinct indices, kept in ascending order.
struct UnorderedSubset {
  std::vector<std::size_t> members;

  friend bool operator==(const UnorderedSubset&, const UnorderedSubset&) = default;
};

enum class DesignKind { maximal, kfold, random };

/// A realized collection of subsets over the sample indices 0..n-1.
///
/// Maximal designs fill `subsets`; k-fold and random designs fill `splits`.
struct Design {
  DesignKind kind = DesignKind::maximal;
  std::size_t n = 0;
  std::size_t folds = 0;     // kfold only
  std::uint64_t seed = 0;    // random only
  std::vector<OrderedSplit> splits;
  std::vector<UnorderedSubset> subsets;

  std::size_t size() const noexcept {
    return kind == DesignKind::maximal ? subsets.size() : splits.size();
  }
};

/// Probability mass of the hypergeometric distribution H(n, m, m): alpha[c] is the
/// chance that two independent uniform m-subsets of an n-set share exactly c
/// elements.
struct HypergeometricWeights {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> alpha;  // indexed c = 0..m
};

HypergeometricWeights hypergeometric_weights(std::size_t n, std::size_t m);

/// Calls visit(subset) for every m-subset of {0..n-1} in lexicographic order.
/// Returns early if visit returns false.
void for_each_subset(std::size_t n, std::size_t m,
                     const std::function<bool(std::span<const std::size_t>)>& visit);

/// Colexicographic rank of an ascending subset: sum_i C(subset[i], i + 1).
std::uint64_t colex_rank(std::span<const std::size_t> ascending,
                         const BinomialTable& binom) noexcept;

/// Every m-subset exactly once, lexicographic. Throws BudgetExceeded when C(n, m)
/// exceeds `budget`.
Design maximal_design(std::size_t n, std::size_t m,
                      std::uint64_t budget = kDefaultEnumerationBudget);

/// K-fold cross-validation with K = n / (n - g) contiguous test blocks. Each test
/// index of block k yields one split whose learning set is every index outside
/// the block, ascending.
Design kfold_design(std::size_t n, std::size_t g);

/// N ordered (g+1)-subsets drawn independently and uniformly (with replacement at
/// the collection level); the last index of each draw is the test point.
Design random_design(std::size_t n, std::size_t g, std::size_t draws, std::uint64_t seed);

/// k distinct indices from {0..n-1}, uniform over ordered subsets.
std::vector<std::size_t> sample_ordered_subset(std::size_t n, std::size_t k, RandomStream& rng);

/// Smallest power-of-ten budget N = 10^(2d+1) at which the Hoeffding bound for a
/// deviation of 10^-d equals 2 exp(-5). Throws InvalidArgument for d = 0 or when
/// N would not fit in 64 bits.
std::uint64_t iterations_for_digits(unsigned digits);

/// 2 exp(-delta^2 N / 2): bound on Pr(|incomplete - complete| >= delta) for a
/// kernel in [-1, 1] averaged over N independent uniform draws.
double hoeffding_bound(double delta, double draws) noexcept;

/// Audit format, one entry per line with 1-based indices. Splits are written as
/// "l1,l2,...;t"; unordered subsets as "i1,i2,...".
void write_design(std::ostream& out, const Design& design);

/// {"n":..,"m":..,"alpha":[...]} with 17 significant digits.
std::string weights_to_json(const HypergeometricWeights& weights);

}  // namespace ucompare
