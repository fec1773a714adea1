#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ucompare {

/// Neumaier's variant of Kahan summation. Adding the same values in the same
/// order always yields the same bits.
class CompensatedSum {
 public:
  void add(double value) noexcept;
  void add(const CompensatedSum& other) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Saturating binomial coefficient; returns UINT64_MAX when C(n, k) does not fit.
std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k) noexcept;

/// log C(n, k) via lgamma. Requires k <= n.
double log_binomial(std::uint64_t n, std::uint64_t k);

/// Table of C(x, j) for 0 <= x <= n and 0 <= j <= k, saturating on overflow.
class BinomialTable {
 public:
  BinomialTable(std::size_t n, std::size_t k);

  std::uint64_t operator()(std::size_t x, std::size_t j) const noexcept {
    return j > k_ || x > n_ ? 0 : table_[x * (k_ + 1) + j];
  }
  std::size_t max_n() const noexcept { return n_; }
  std::size_t max_k() const noexcept { return k_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<std::uint64_t> table_;
};

}  // namespace ucompare
