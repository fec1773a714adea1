#include "ucompare/numeric.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>

#include "ucompare/errors.hpp"

namespace ucompare {

void CompensatedSum::add(double value) noexcept {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::add(const CompensatedSum& other) noexcept {
  add(other.sum_);
  add(other.compensation_);
}

std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k) noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; divide by the gcd first to
    // delay overflow.
    const std::uint64_t num = n - k + i;
    std::uint64_t a = result, b = i;
    std::uint64_t g = std::gcd(a, b);
    a /= g;
    b /= g;
    const std::uint64_t num_reduced = num / b;  // b divides num * a and gcd(a, b) == 1
    if (num_reduced != 0 && a > kMax / num_reduced) return kMax;
    result = a * num_reduced;
  }
  return result;
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw InvalidArgument("log_binomial: k > n");
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

BinomialTable::BinomialTable(std::size_t n, std::size_t k)
    : n_(n), k_(k), table_((n + 1) * (k + 1), 0) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t x = 0; x <= n; ++x) {
    table_[x * (k + 1)] = 1;
    for (std::size_t j = 1; j <= std::min(x, k); ++j) {
      const std::uint64_t left = table_[(x - 1) * (k + 1) + j - 1];
      const std::uint64_t right = j <= x - 1 ? table_[(x - 1) * (k + 1) + j] : 0;
      table_[x * (k + 1) + j] = left > kMax - right ? kMax : left + right;
    }
  }
}

}  // namespace ucompare
