#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ucompare/dataset.hpp"
#include "ucompare/designs.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/random.hpp"

namespace ucompare {

enum class EstimationMode {
  complete,    // enumerate the maximal design
  incomplete,  // Monte Carlo over independent uniform draws
};

struct EstimatorConfig {
  std::size_t g = 1;
  /// Monte Carlo budgets. For the error difference the budget counts learner
  /// fits (each fit is tested on all n - g held-out points); for the variance
  /// components it counts product-kernel draws. n_kappa applies to every c.
  std::uint64_t n_delta = 100'000;
  std::uint64_t n_kappa = 100'000;
  std::uint64_t n_theta2 = 100'000;
  std::uint64_t seed = 0;
  EstimationMode mode = EstimationMode::incomplete;
  std::size_t threads = 1;  // 0 = hardware concurrency
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  std::size_t cache_capacity = PhiZeroCache::kDefaultCapacity;
  /// kappa_1 - theta^2 must exceed this for the statistic to count as non-degenerate.
  double nondegeneracy_tolerance = 1e-8;

  std::size_t degree() const noexcept { return g + 1; }
  /// Throws InvalidArgument on a zero g or zero budget.
  void validate() const;
};

/// Unbiased estimate of the variance of the complete error-difference estimator,
/// with the components it was assembled from.
struct VarianceEstimate {
  double v_hat = 0.0;
  std::vector<double> kappa_hats;  // kappa_hats[c - 1] for c = 1..m
  double theta2_hat = 0.0;
  HypergeometricWeights alpha;
  /// v_hat <= 0; it is reported as computed, never clamped.
  bool nonpositive = false;

  double kappa(std::size_t c) const { return kappa_hats.at(c - 1); }
  /// kappa_c - theta^2 for each c (Hoeffding's zeta_c), index c - 1.
  std::vector<double> zeta_hats() const;
  /// sum_{c>=1} alpha_c kappa_c - (1 - alpha_0) theta^2 from the stored fields.
  double recompute() const;
  /// kappa_1 - theta^2 > tolerance.
  bool nondegenerate(double tolerance) const;
};

/// Symmetric kernel on an index set (of the size the caller fixed).
using SubsetKernel = std::function<double(std::span<const std::size_t>)>;
/// Produces one kernel per worker, so kernels may carry unsynchronized state.
using SubsetKernelFactory = std::function<SubsetKernel()>;

/// Mean of `kernel` over all C(n, m) subsets, enumerated lexicographically.
/// Throws BudgetExceeded if C(n, m) > budget.
double complete_u_statistic(const SubsetKernel& kernel, std::size_t n, std::size_t m,
                            std::uint64_t budget = kDefaultEnumerationBudget);

/// Mean of an ordered-tuple kernel over `draws` independent uniform ordered
/// m-subsets. Draws are grouped in fixed chunks, chunk j drawing from
/// stream.split(j), and the per-chunk compensated sums are folded in chunk order,
/// so the result depends only on (stream seed, draws) and not on `threads`.
double incomplete_u_statistic(const SubsetKernelFactory& make_kernel, std::size_t n,
                              std::size_t m, std::uint64_t draws, const RandomStream& stream,
                              std::size_t threads = 1);

/// Draws per chunk in incomplete_u_statistic and the batched delta estimator.
inline constexpr std::uint64_t kDrawsPerChunk = 1024;

/// All phi0 values of the maximal design, plus the pair-overlap sums needed for
/// complete-mode kappa_c and theta^2.
///
/// Construction fits each learner once per g-subset and tests on the n - g
/// remaining points. The overlap sums P_c = sum over ordered pairs (A, B) of
/// m-subsets with |A n B| = c of phi0(A) phi0(B) are obtained from the subset
/// sums S_T = sum_{A >= T} phi0(A) through the binomial identity
/// sum_{|T|=t} S_T^2 = sum_c C(c, t) P_c.
class CompleteKernelTable {
 public:
  /// Throws BudgetExceeded if C(n, m) > budget.
  CompleteKernelTable(const ComparisonKernel& kernel, const Dataset& data,
                      std::uint64_t budget = kDefaultEnumerationBudget,
                      std::size_t threads = 1);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  /// phi0 of every m-subset, indexed by colexicographic rank.
  std::span<const double> values() const noexcept { return values_; }

  /// The complete error-difference estimator: the mean of values().
  double mean() const;
  /// Complete U-statistic of the kappa_c product kernel (degree 2m - c).
  double kappa(std::size_t c) const;
  /// Complete U-statistic of the disjoint-window product kernel (degree 2m).
  double theta2() const;

 private:
  void compute_overlap_sums() const;

  std::size_t n_;
  std::size_t m_;
  std::uint64_t budget_;
  std::vector<double> values_;
  mutable std::vector<long double> overlap_sums_;  // P_c, c = 0..m
};

/// Error-difference estimate. Complete mode returns the mean of phi0 over the
/// maximal design; incomplete mode averages phi over n_delta random learning
/// sets, each tested on all n - g held-out points.
double estimate_delta(const ComparisonKernel& kernel, const Dataset& data,
                      const EstimatorConfig& config);

/// Unbiased estimate of kappa_c. Throws InsufficientSample if 2m - c > n.
double estimate_kappa_c(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                        const EstimatorConfig& config);

/// Unbiased estimate of delta^2 (not the plug-in delta_hat^2). Throws
/// InsufficientSample if n < 2g + 2.
double estimate_theta2(const ComparisonKernel& kernel, const Dataset& data,
                       const EstimatorConfig& config);

/// v_hat = sum_c alpha_c kappa_c - (1 - alpha_0) theta^2. Throws
/// InsufficientSample if n < 2g + 2: below that size no unbiased estimator exists.
VarianceEstimate estimate_variance(const ComparisonKernel& kernel, const Dataset& data,
                                   const EstimatorConfig& config);

struct ComparisonEstimate {
  double delta_hat = 0.0;
  std::optional<VarianceEstimate> variance;
};

/// estimate_delta plus (optionally) estimate_variance, sharing one kernel table
/// in complete mode.
ComparisonEstimate estimate_comparison(const ComparisonKernel& kernel, const Dataset& data,
                                       const EstimatorConfig& config, bool with_variance);

/// Cross-validation-like estimate: the mean of phi over the splits of an ordered
/// design, or of phi0 over the subsets of an unordered one. Consecutive splits
/// that share a learning set reuse one fit.
double design_average(const ComparisonKernel& kernel, const Dataset& data, const Design& design);

}  // namespace ucompare
