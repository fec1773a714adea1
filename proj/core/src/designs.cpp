#include "ucompare/designs.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ucompare/errors.hpp"

namespace ucompare {

namespace {

constexpr std::uint64_t kExactDoubleLimit = std::uint64_t{1} << 53;

std::string format17(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

HypergeometricWeights hypergeometric_weights(std::size_t n, std::size_t m) {
  if (m == 0 || m > n) {
    throw InvalidArgument("hypergeometric_weights: need 1 <= m <= n (got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
  }
  HypergeometricWeights w{n, m, std::vector<double>(m + 1, 0.0)};
  const std::size_t c_min = 2 * m > n ? 2 * m - n : 0;

  const std::uint64_t total = binomial_saturating(n, m);
  if (total < kExactDoubleLimit) {
    // C(m, c) C(n-m, m-c) <= C(n, m) by Vandermonde, so the integer products are exact.
    for (std::size_t c = c_min; c <= m; ++c) {
      const std::uint64_t count = binomial_saturating(m, c) * binomial_saturating(n - m, m - c);
      w.alpha[c] = static_cast<double>(count) / static_cast<double>(total);
    }
    return w;
  }

  // Large n: walk the mass-function ratio
  // alpha_{c+1} / alpha_c = (m-c)^2 / ((c+1)(n-2m+c+1)) outward from the mode,
  // where the value is set to 1, then normalize. Tails may underflow to 0.
  auto ratio = [&](std::size_t c) {
    const double mc = static_cast<double>(m - c);
    return mc * mc / (static_cast<double>(c + 1) * static_cast<double>(n - 2 * m + c + 1));
  };
  std::size_t mode = c_min;
  while (mode < m && ratio(mode) > 1.0) ++mode;
  w.alpha[mode] = 1.0;
  for (std::size_t c = mode; c < m; ++c) w.alpha[c + 1] = w.alpha[c] * ratio(c);
  for (std::size_t c = mode; c > c_min; --c) w.alpha[c - 1] = w.alpha[c] / ratio(c - 1);
  const double sum = std::accumulate(w.alpha.begin(), w.alpha.end(), 0.0);
  for (double& a : w.alpha) a /= sum;
  return w;
}

void for_each_subset(std::size_t n, std::size_t m,
                     const std::function<bool(std::span<const std::size_t>)>& visit) {
  if (m > n) return;
  std::vector<std::size_t> subset(m);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  for (;;) {
    if (!visit(subset)) return;
    // Rightmost position that can still advance.
    std::size_t i = m;
    while (i > 0 && subset[i - 1] == n - m + i - 1) --i;
    if (i == 0) return;
    ++subset[i - 1];
    for (std::size_t j = i; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }
}

std::uint64_t colex_rank(std::span<const std::size_t> ascending, const BinomialTable& binom) noexcept {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < ascending.size(); ++i) rank += binom(ascending[i], i + 1);
  return rank;
}

Design maximal_design(std::size_t n, std::size_t m, std::uint64_t budget) {
  if (m == 0 || m > n) throw InvalidArgument("maximal_design: need 1 <= m <= n");
  const std::uint64_t count = binomial_saturating(n, m);
  if (count > budget) {
    throw BudgetExceeded("budget exceeded: C(" + std::to_string(n) + ", " + std::to_string(m) +
                         ") subsets exceed the enumeration budget of " + std::to_string(budget) +
                         "; use a random design");
  }
  Design design;
  design.kind = DesignKind::maximal;
  design.n = n;
  design.subsets.reserve(count);
  for_each_subset(n, m, [&](std::span<const std::size_t> s) {
    design.subsets.push_back({std::vector<std::size_t>(s.begin(), s.end())});
    return true;
  });
  return design;
}

Design kfold_design(std::size_t n, std::size_t g) {
  if (g == 0 || g >= n) throw InvalidArgument("kfold_design: need 1 <= g < n");
  const std::size_t block = n - g;
  if (n % block != 0) {
    throw InvalidArgument("kfold_design: n - g = " + std::to_string(block) + " does not divide n = " +
                          std::to_string(n));
  }
  const std::size_t folds = n / block;
  if (folds < 2) throw InvalidArgument("kfold_design: need g >= n / 2");

  Design design;
  design.kind = DesignKind::kfold;
  design.n = n;
  design.folds = folds;
  design.splits.reserve(n);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<std::size_t> learn;
    learn.reserve(g);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < k * block || i >= (k + 1) * block) learn.push_back(i);
    }
    for (std::size_t t = k * block; t < (k + 1) * block; ++t) design.splits.push_back({learn, t});
  }
  return design;
}

Design random_design(std::size_t n, std::size_t g, std::size_t draws, std::uint64_t seed) {
  if (g + 1 > n) throw InvalidArgument("random_design: need g + 1 <= n");
  Design design;
  design.kind = DesignKind::random;
  design.n = n;
  design.seed = seed;
  design.splits.reserve(draws);
  RandomStream rng(seed);
  OrderedSubsetSampler sampler(n);
  std::vector<std::size_t> draw(g + 1);
  for (std::size_t d = 0; d < draws; ++d) {
    sampler.sample(rng, draw);
    design.splits.push_back({std::vector<std::size_t>(draw.begin(), draw.end() - 1), draw.back()});
  }
  return design;
}

std::vector<std::size_t> sample_ordered_subset(std::size_t n, std::size_t k, RandomStream& rng) {
  if (k == 0 || k > n) throw InvalidArgument("sample_ordered_subset: need 1 <= k <= n");
  OrderedSubsetSampler sampler(n);
  std::vector<std::size_t> out(k);
  sampler.sample(rng, out);
  return out;
}

std::uint64_t iterations_for_digits(unsigned digits) {
  if (digits == 0) throw InvalidArgument("iterations_for_digits: need at least one digit");
  const unsigned exponent = 2 * digits + 1;
  if (exponent > 19) {
    throw InvalidArgument("iterations_for_digits: 10^" + std::to_string(exponent) +
                          " iterations overflow a 64-bit count");
  }
  std::uint64_t n = 1;
  for (unsigned i = 0; i < exponent; ++i) n *= 10;
  return n;
}

double hoeffding_bound(double delta, double draws) noexcept {
  return 2.0 * std::exp(-delta * delta * draws / 2.0);
}

void write_design(std::ostream& out, const Design& design) {
  auto write_list = [&](const std::vector<std::size_t>& indices) {
    for (std::size_t i = 0; i < indices.size(); ++i) out << (i ? "," : "") << indices[i] + 1;
  };
  if (design.kind == DesignKind::maximal) {
    for (const auto& s : design.subsets) {
      write_list(s.members);
      out << '\n';
    }
    return;
  }
  for (const auto& split : design.splits) {
    write_list(split.learn);
    out << ';' << split.test + 1 << '\n';
  }
}

std::string weights_to_json(const HypergeometricWeights& weights) {
  std::string json = "{\"n\":" + std::to_string(weights.n) + ",\"m\":" + std::to_string(weights.m) +
                     ",\"alpha\":[";
  for (std::size_t c = 0; c < weights.alpha.size(); ++c) {
    if (c) json += ',';
    json += format17(weights.alpha[c]);
  }
  return json + "]}";
}

}  // namespace ucompare
