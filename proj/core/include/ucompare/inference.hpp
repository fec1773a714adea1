#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "ucompare/estimators.hpp"

namespace ucompare {

/// Which variance estimate studentizes the error difference.
enum class VarianceMode {
  /// (g+1)^2 (kappa_1_hat - theta2_hat) / n: biased upwards, conservative.
  plugin_asymptotic,
  /// The unbiased v_hat.
  unbiased,
};

std::string_view to_string(VarianceMode mode) noexcept;
/// Accepts "unbiased" and "plugin" (or "plugin_asymptotic").
VarianceMode parse_variance_mode(std::string_view text);

/// Standard normal distribution function.
double normal_cdf(double x) noexcept;
/// Upper tail 1 - normal_cdf(x), accurate for large x.
double normal_sf(double x) noexcept;
/// Inverse of normal_cdf on (0, 1): Acklam's rational approximation followed by
/// one Halley step against erfc. Throws InvalidArgument outside (0, 1).
double normal_quantile(double p);

/// delta_hat / sqrt(u_n). Throws DegenerateVariance when u_n <= 0.
double studentize(double delta_hat, double u_n);

/// Result of the two-sided asymptotic test of equal error rates.
struct TestResult {
  double delta_hat = 0.0;
  double u_n = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  VarianceMode mode_used = VarianceMode::unbiased;
  bool degenerate = false;
  /// Empty when degenerate.
  std::optional<bool> reject;
};

/// Rejects when |delta_hat| >= sqrt(u_n) z_{1-alpha/2}, which is equivalent to
/// p <= alpha. A non-positive u_n gives a degenerate result with no decision.
TestResult two_sided_test(double delta_hat, double u_n, double alpha,
                          VarianceMode mode = VarianceMode::unbiased);

/// delta_hat -/+ sqrt(u_n) z_{1-alpha/2}. Throws DegenerateVariance when u_n <= 0.
std::pair<double, double> confidence_interval(double delta_hat, double u_n, double alpha);

/// u(n) for the given mode.
double variance_for_mode(const VarianceEstimate& variance, VarianceMode mode, std::size_t n,
                         std::size_t g);

/// Tests with the requested mode; when mode is unbiased and v_hat <= 0 it falls
/// back to the plug-in variance and records that in mode_used.
TestResult test_comparison(double delta_hat, const VarianceEstimate& variance, std::size_t n,
                           std::size_t g, double alpha,
                           VarianceMode mode = VarianceMode::unbiased);

}  // namespace ucompare
