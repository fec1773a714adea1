#include "ucompare/inference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ucompare/errors.hpp"

namespace ucompare {

std::string_view to_string(VarianceMode mode) noexcept {
  return mode == VarianceMode::unbiased ? "unbiased" : "plugin";
}

VarianceMode parse_variance_mode(std::string_view text) {
  if (text == "unbiased") return VarianceMode::unbiased;
  if (text == "plugin" || text == "plugin_asymptotic") return VarianceMode::plugin_asymptotic;
  throw InvalidArgument("unknown variance mode '" + std::string(text) + "' (expected unbiased or plugin)");
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0, 1)");

  // P. J. Acklam's rational approximation (relative error below 1.15e-9).
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step on normal_cdf(x) - p.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double studentize(double delta_hat, double u_n) {
  if (!(u_n > 0.0)) throw DegenerateVariance("cannot studentize with variance " + std::to_string(u_n), u_n);
  return delta_hat / std::sqrt(u_n);
}

std::pair<double, double> confidence_interval(double delta_hat, double u_n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(u_n > 0.0)) {
    throw DegenerateVariance("confidence interval needs a positive variance, got " + std::to_string(u_n), u_n);
  }
  const double half_width = std::sqrt(u_n) * normal_quantile(1.0 - alpha / 2.0);
  return {delta_hat - half_width, delta_hat + half_width};
}

TestResult two_sided_test(double delta_hat, double u_n, double alpha, VarianceMode mode) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  TestResult r;
  r.delta_hat = delta_hat;
  r.u_n = u_n;
  r.alpha = alpha;
  r.mode_used = mode;
  if (!(u_n > 0.0) || !std::isfinite(u_n)) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    r.degenerate = true;
    r.statistic = nan;
    r.p_value = nan;
    r.ci_low = nan;
    r.ci_high = nan;
    return r;
  }
  r.statistic = studentize(delta_hat, u_n);
  r.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(r.statistic)));
  // One half-width for both the interval and the decision, so rejecting is
  // exactly "0 lies outside the open interval (ci_low, ci_high)".
  const double half_width = std::sqrt(u_n) * normal_quantile(1.0 - alpha / 2.0);
  r.ci_low = delta_hat - half_width;
  r.ci_high = delta_hat + half_width;
  r.reject = std::abs(delta_hat) >= half_width;
  return r;
}

double variance_for_mode(const VarianceEstimate& variance, VarianceMode mode, std::size_t n, std::size_t g) {
  if (mode == VarianceMode::unbiased) return variance.v_hat;
  const double m = static_cast<double>(g + 1);
  return m * m * (variance.kappa(1) - variance.theta2_hat) / static_cast<double>(n);
}

TestResult test_comparison(double delta_hat, const VarianceEstimate& variance, std::size_t n,
                           std::size_t g, double alpha, VarianceMode mode) {
  double u = variance_for_mode(variance, mode, n, g);
  if (mode == VarianceMode::unbiased && !(u > 0.0)) {
    mode = VarianceMode::plugin_asymptotic;
    u = variance_for_mode(variance, mode, n, g);
  }
  return two_sided_test(delta_hat, u, alpha, mode);
}

}  // namespace ucompare
