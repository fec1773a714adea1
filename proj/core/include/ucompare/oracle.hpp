#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ucompare/dataset.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/random.hpp"

namespace ucompare {

/// Exact population quantities for finitely supported distributions, by full
/// enumeration. These are ground truth for the estimator tests.

/// Finitely supported distribution over observations.
class DiscreteDistribution {
 public:
  struct Atom {
    Observation observation;
    double probability;
  };

  /// Requires at least two atoms, positive probabilities summing to 1 within
  /// 1e-12, and a common feature dimension.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  std::size_t support_size() const noexcept { return atoms_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  /// P(Y = 1).
  double positive_rate() const noexcept;

  /// Dataset whose i-th row is atom[atom_indices[i]].
  Dataset realize(std::span<const std::size_t> atom_indices) const;

  /// n i.i.d. draws.
  Dataset sample(std::size_t n, RandomStream& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

/// Default cap on the number of weighted tuples or datasets enumerated.
inline constexpr std::uint64_t kDefaultOracleBudget = 1'000'000;

/// Calls visit(atom_indices, probability) for every ordered k-tuple of atoms in
/// mixed-radix order (last position fastest), with the product probability kept
/// as a running product. Throws BudgetExceeded if s^k > budget.
void for_each_atom_tuple(const DiscreteDistribution& dist, std::size_t k,
                         const std::function<void(std::span<const std::size_t>, double)>& visit,
                         std::uint64_t budget = kDefaultOracleBudget);

/// E[phi] over g+1 independent draws: the true error-rate difference.
double true_delta(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                  std::uint64_t budget = kDefaultOracleBudget);

/// E[phi0(Z_1..Z_m) phi0(Z_{m-c+1}..Z_{2m-c})] for 1 <= c <= m.
double true_kappa_c(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                    std::size_t c, std::uint64_t budget = kDefaultOracleBudget);

/// E[phi0(Z_1..Z_m) phi0(Z_{m+1}..Z_{2m})] = delta^2, by enumeration of 2m-tuples.
double true_theta2(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                   std::uint64_t budget = kDefaultOracleBudget);

/// E[phi0] over g+1 independent draws, phi0 in its cyclic form. Equals
/// true_delta for any symmetric learner pair.
double true_delta_symmetrized(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                              std::uint64_t budget = kDefaultOracleBudget);

using DatasetEstimator = std::function<double(const Dataset&)>;

/// Exact mean and variance of an estimator over all s^n ordered datasets.
struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
};

ExactMoments exact_estimator_moments(const DiscreteDistribution& dist, std::size_t n,
                                     const DatasetEstimator& estimator,
                                     std::uint64_t budget = kDefaultOracleBudget);

double exact_estimator_expectation(const DiscreteDistribution& dist, std::size_t n,
                                   const DatasetEstimator& estimator,
                                   std::uint64_t budget = kDefaultOracleBudget);

/// E[est^2] - E[est]^2.
double exact_estimator_variance(const DiscreteDistribution& dist, std::size_t n,
                                const DatasetEstimator& estimator,
                                std::uint64_t budget = kDefaultOracleBudget);

/// Exact variance of the complete estimator at sample size n from the population
/// components: sum_c alpha_c kappa_c - (1 - alpha_0) delta^2.
double variance_from_components(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                                std::size_t n, std::uint64_t budget = kDefaultOracleBudget);

}  // namespace ucompare
