#include "ucompare/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ucompare/errors.hpp"
#include "ucompare/numeric.hpp"
#include "ucompare/parallel.hpp"

namespace ucompare {

namespace {

// Child-stream keys of the root seed, one per statistic.
constexpr std::uint64_t kStreamDelta = 1;
constexpr std::uint64_t kStreamTheta2 = 2;
constexpr std::uint64_t kStreamKappaBase = 16;  // + c

// Subsets handled per task when building the complete kernel table.
constexpr std::uint64_t kSubsetsPerTask = 4096;

// Overlap sums visit every subset of every m-subset; cap that at this multiple
// of the enumeration budget.
constexpr std::uint64_t kOverlapWorkFactor = 64;

std::string sample_size_message(std::size_t n, std::size_t g) {
  return "no unbiased variance estimator exists for n < 2g + 2 (n = " + std::to_string(n) +
         ", g = " + std::to_string(g) + ", need n >= " + std::to_string(2 * g + 2) + ")";
}

void require_degree(std::size_t degree, std::size_t n, const char* what) {
  if (degree > n) {
    throw InsufficientSample(std::string(what) + " has degree " + std::to_string(degree) +
                                 " but the sample has only n = " + std::to_string(n) + " observations",
                             n, degree);
  }
}

// Ascending k-subset of {0..n-1} with the given colexicographic rank.
void colex_unrank(std::uint64_t rank, std::size_t n, const BinomialTable& binom,
                  std::span<std::size_t> out) {
  std::size_t x = n;
  for (std::size_t i = out.size(); i > 0; --i) {
    // Largest x with C(x, i) <= rank.
    do {
      --x;
    } while (binom(x, i) > rank);
    out[i - 1] = x;
    rank -= binom(x, i);
  }
}

// Next ascending subset in colexicographic order; false after the last one.
bool colex_next(std::span<std::size_t> s, std::size_t n) {
  const std::size_t k = s.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t limit = i + 1 < k ? s[i + 1] : n;
    if (s[i] + 1 < limit) {
      ++s[i];
      for (std::size_t j = 0; j < i; ++j) s[j] = j;
      return true;
    }
  }
  return false;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (g == 0) throw InvalidArgument("learning-set size g must be at least 1");
  if (n_delta == 0 || n_kappa == 0 || n_theta2 == 0) {
    throw InvalidArgument("Monte Carlo budgets must be at least 1");
  }
}

namespace {

void check_config(const EstimatorConfig& config, const ComparisonKernel& kernel) {
  config.validate();
  if (config.g != kernel.learning_size()) {
    throw InvalidArgument("config g = " + std::to_string(config.g) + " but the kernel has g = " +
                          std::to_string(kernel.learning_size()));
  }
}

}  // namespace

std::vector<double> VarianceEstimate::zeta_hats() const {
  std::vector<double> z(kappa_hats.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = kappa_hats[i] - theta2_hat;
  return z;
}

double VarianceEstimate::recompute() const {
  double sum = 0.0;
  for (std::size_t c = 1; c < alpha.alpha.size(); ++c) sum += alpha.alpha[c] * kappa_hats[c - 1];
  return sum - (1.0 - alpha.alpha[0]) * theta2_hat;
}

bool VarianceEstimate::nondegenerate(double tolerance) const {
  return !kappa_hats.empty() && kappa_hats.front() - theta2_hat > tolerance;
}

double complete_u_statistic(const SubsetKernel& kernel, std::size_t n, std::size_t m,
                            std::uint64_t budget) {
  if (m == 0 || m > n) throw InvalidArgument("complete_u_statistic: need 1 <= m <= n");
  const std::uint64_t count = binomial_saturating(n, m);
  if (count > budget) {
    throw BudgetExceeded("budget exceeded: C(" + std::to_string(n) + ", " + std::to_string(m) +
                         ") subsets exceed the enumeration budget of " + std::to_string(budget));
  }
  CompensatedSum sum;
  for_each_subset(n, m, [&](std::span<const std::size_t> s) {
    sum.add(kernel(s));
    return true;
  });
  return sum.value() / static_cast<double>(count);
}

double incomplete_u_statistic(const SubsetKernelFactory& make_kernel, std::size_t n, std::size_t m,
                              std::uint64_t draws, const RandomStream& stream, std::size_t threads) {
  if (m == 0 || m > n) throw InvalidArgument("incomplete_u_statistic: need 1 <= m <= n");
  if (draws == 0) throw InvalidArgument("incomplete_u_statistic: need at least one draw");

  const std::uint64_t chunks = (draws + kDrawsPerChunk - 1) / kDrawsPerChunk;
  const std::size_t workers = effective_threads(threads, chunks);
  std::vector<SubsetKernel> kernels;
  kernels.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) kernels.push_back(make_kernel());

  std::vector<CompensatedSum> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t chunk, std::size_t worker) {
    RandomStream rng = stream.split(chunk);
    OrderedSubsetSampler sampler(n);
    std::vector<std::size_t> draw(m);
    const std::uint64_t begin = chunk * kDrawsPerChunk;
    const std::uint64_t end = std::min(draws, begin + kDrawsPerChunk);
    CompensatedSum sum;
    for (std::uint64_t d = begin; d < end; ++d) {
      sampler.sample(rng, draw);
      sum.add(kernels[worker](draw));
    }
    partial[chunk] = sum;
  });

  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total.value() / static_cast<double>(draws);
}

CompleteKernelTable::CompleteKernelTable(const ComparisonKernel& kernel, const Dataset& data,
                                         std::uint64_t budget, std::size_t threads)
    : n_(data.size()), m_(kernel.degree()), budget_(budget) {
  const std::size_t g = kernel.learning_size();
  require_degree(m_, n_, "the error-difference kernel");
  const std::uint64_t subsets = binomial_saturating(n_, m_);
  if (subsets > budget) {
    throw BudgetExceeded("budget exceeded: the maximal design has C(" + std::to_string(n_) + ", " +
                         std::to_string(m_) + ") subsets, more than the enumeration budget of " +
                         std::to_string(budget) + "; use incomplete mode");
  }
  const BinomialTable binom(n_, m_);
  const std::uint64_t learn_sets = binom(n_, g);
  const std::size_t held_out = n_ - g;

  // phi for every (learning set, held-out point), rows in colex order of the
  // learning set, columns in ascending order of the held-out index.
  std::vector<double> phi(learn_sets * held_out);
  const std::uint64_t learn_tasks = (learn_sets + kSubsetsPerTask - 1) / kSubsetsPerTask;
  parallel_for(learn_tasks, threads, [&](std::size_t task, std::size_t) {
    const std::uint64_t begin = task * kSubsetsPerTask;
    const std::uint64_t end = std::min(learn_sets, begin + kSubsetsPerTask);
    std::vector<std::size_t> learn(g);
    std::vector<std::size_t> tests(held_out);
    colex_unrank(begin, n_, binom, learn);
    for (std::uint64_t r = begin; r < end; ++r) {
      std::size_t t = 0;
      for (std::size_t i = 0, j = 0; i < n_; ++i) {
        if (j < g && learn[j] == i) {
          ++j;
        } else {
          tests[t++] = i;
        }
      }
      kernel.phi_batch(data, learn, tests, std::span<double>(phi).subspan(r * held_out, held_out));
      colex_next(learn, n_);
    }
  });

  // phi0(A) = (1/m) sum_i phi(A \ {a_i}; a_i). The held-out position of a_i
  // relative to A \ {a_i} is a_i - i because exactly i members of A lie below it.
  values_.assign(subsets, 0.0);
  const std::uint64_t gather_tasks = (subsets + kSubsetsPerTask - 1) / kSubsetsPerTask;
  parallel_for(gather_tasks, threads, [&](std::size_t task, std::size_t) {
    const std::uint64_t begin = task * kSubsetsPerTask;
    const std::uint64_t end = std::min(subsets, begin + kSubsetsPerTask);
    std::vector<std::size_t> a(m_);
    colex_unrank(begin, n_, binom, a);
    for (std::uint64_t r = begin; r < end; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        std::uint64_t learn_rank = 0;
        for (std::size_t j = 0; j < i; ++j) learn_rank += binom(a[j], j + 1);
        for (std::size_t j = i + 1; j < m_; ++j) learn_rank += binom(a[j], j);
        sum += phi[learn_rank * held_out + (a[i] - i)];
      }
      values_[r] = sum / static_cast<double>(m_);
      colex_next(a, n_);
    }
  });
}

double CompleteKernelTable::mean() const {
  CompensatedSum sum;
  for (const double v : values_) sum.add(v);
  return sum.value() / static_cast<double>(values_.size());
}

void CompleteKernelTable::compute_overlap_sums() const {
  if (!overlap_sums_.empty()) return;
  const std::size_t m = m_;
  const BinomialTable binom(n_, m);
  for (std::size_t t = 0; t <= m; ++t) {
    if (binom(n_, t) > budget_) {
      throw BudgetExceeded("budget exceeded: overlap sums need C(" + std::to_string(n_) + ", " +
                           std::to_string(t) + ") slots");
    }
  }
  if (m >= 63 || static_cast<double>(values_.size()) * std::ldexp(1.0, static_cast<int>(m)) >
                     static_cast<double>(kOverlapWorkFactor) * static_cast<double>(budget_)) {
    throw BudgetExceeded("budget exceeded: overlap sums would visit C(n, m) * 2^m subsets");
  }

  // S_T = sum of phi0(A) over m-subsets A containing T, for every |T| <= m.
  std::vector<std::vector<long double>> subset_sums(m + 1);
  for (std::size_t t = 0; t <= m; ++t) subset_sums[t].assign(binom(n_, t), 0.0L);
  std::vector<std::size_t> a(m);
  std::iota(a.begin(), a.end(), std::size_t{0});
  const std::uint64_t masks = std::uint64_t{1} << m;
  for (std::uint64_t r = 0; r < values_.size(); ++r) {
    const long double v = values_[r];
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      std::uint64_t rank = 0;
      std::size_t size = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (mask >> j & 1U) rank += binom(a[j], ++size);
      }
      subset_sums[size][rank] += v;
    }
    colex_next(a, n_);
  }

  // W_t = sum_{|T|=t} S_T^2 = sum_c C(c, t) P_c; invert for P_c.
  std::vector<long double> w(m + 1, 0.0L);
  for (std::size_t t = 0; t <= m; ++t) {
    for (const long double s : subset_sums[t]) w[t] += s * s;
  }
  overlap_sums_.assign(m + 1, 0.0L);
  for (std::size_t c = 0; c <= m; ++c) {
    long double p = 0.0L;
    for (std::size_t t = c; t <= m; ++t) {
      const long double term = static_cast<long double>(binom(t, c)) * w[t];
      p += (t - c) % 2 == 0 ? term : -term;
    }
    overlap_sums_[c] = p;
  }
}

double CompleteKernelTable::kappa(std::size_t c) const {
  if (c < 1 || c > m_) throw InvalidArgument("kappa: overlap c outside 1..m");
  require_degree(2 * m_ - c, n_, "the kappa product kernel");
  compute_overlap_sums();
  const long double pairs = static_cast<long double>(values_.size()) *
                            static_cast<long double>(binomial_saturating(m_, c)) *
                            static_cast<long double>(binomial_saturating(n_ - m_, m_ - c));
  return static_cast<double>(overlap_sums_[c] / pairs);
}

double CompleteKernelTable::theta2() const {
  require_degree(2 * m_, n_, "the theta^2 product kernel");
  compute_overlap_sums();
  const long double pairs = static_cast<long double>(values_.size()) *
                            static_cast<long double>(binomial_saturating(n_ - m_, m_));
  return static_cast<double>(overlap_sums_[0] / pairs);
}

double estimate_delta(const ComparisonKernel& kernel, const Dataset& data, const EstimatorConfig& config) {
  check_config(config, kernel);
  const std::size_t n = data.size();
  const std::size_t g = kernel.learning_size();
  require_degree(g + 1, n, "the error-difference kernel");
  if (config.mode == EstimationMode::complete) {
    return CompleteKernelTable(kernel, data, config.enumeration_budget, config.threads).mean();
  }

  // Batched Monte Carlo: one fit of each learner per draw, tested on every
  // held-out point.
  const RandomStream stream = RandomStream(config.seed).split(kStreamDelta);
  const std::uint64_t draws = config.n_delta;
  const std::uint64_t chunks = (draws + kDrawsPerChunk - 1) / kDrawsPerChunk;
  std::vector<CompensatedSum> partial(chunks);
  parallel_for(chunks, config.threads, [&](std::size_t chunk, std::size_t) {
    RandomStream rng = stream.split(chunk);
    OrderedSubsetSampler sampler(n);
    std::vector<std::size_t> learn(g);
    std::vector<std::size_t> tests(n - g);
    std::vector<double> phi(n - g);
    std::vector<char> in_learn(n);
    const std::uint64_t begin = chunk * kDrawsPerChunk;
    const std::uint64_t end = std::min(draws, begin + kDrawsPerChunk);
    CompensatedSum sum;
    for (std::uint64_t d = begin; d < end; ++d) {
      sampler.sample(rng, learn);
      std::fill(in_learn.begin(), in_learn.end(), 0);
      for (const std::size_t i : learn) in_learn[i] = 1;
      std::size_t t = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_learn[i]) tests[t++] = i;
      }
      kernel.phi_batch(data, learn, tests, phi);
      double batch = 0.0;
      for (const double v : phi) batch += v;
      sum.add(batch / static_cast<double>(n - g));
    }
    partial[chunk] = sum;
  });
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total.value() / static_cast<double>(draws);
}

namespace {

SubsetKernelFactory kappa_factory(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                                  std::size_t cache_capacity) {
  return [&kernel, &data, c, cache_capacity]() -> SubsetKernel {
    auto evaluator = std::make_shared<KernelEvaluator>(kernel, data, cache_capacity);
    return [evaluator, c](std::span<const std::size_t> idx) { return evaluator->kappa(c, idx); };
  };
}

SubsetKernelFactory theta2_factory(const ComparisonKernel& kernel, const Dataset& data,
                                   std::size_t cache_capacity) {
  return [&kernel, &data, cache_capacity]() -> SubsetKernel {
    auto evaluator = std::make_shared<KernelEvaluator>(kernel, data, cache_capacity);
    return [evaluator](std::span<const std::size_t> idx) { return evaluator->theta2(idx); };
  };
}

double kappa_incomplete(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                        const EstimatorConfig& config) {
  const std::size_t m = kernel.degree();
  const RandomStream stream = RandomStream(config.seed).split(kStreamKappaBase + c);
  return incomplete_u_statistic(kappa_factory(kernel, data, c, config.cache_capacity), data.size(),
                                2 * m - c, config.n_kappa, stream, config.threads);
}

double theta2_incomplete(const ComparisonKernel& kernel, const Dataset& data,
                         const EstimatorConfig& config) {
  const std::size_t m = kernel.degree();
  const RandomStream stream = RandomStream(config.seed).split(kStreamTheta2);
  return incomplete_u_statistic(theta2_factory(kernel, data, config.cache_capacity), data.size(),
                                2 * m, config.n_theta2, stream, config.threads);
}

VarianceEstimate assemble_variance(std::size_t n, std::size_t m, std::vector<double> kappas,
                                   double theta2) {
  VarianceEstimate v;
  v.kappa_hats = std::move(kappas);
  v.theta2_hat = theta2;
  v.alpha = hypergeometric_weights(n, m);
  v.v_hat = v.recompute();
  v.nonpositive = v.v_hat <= 0.0;
  return v;
}

void require_variance_sample(std::size_t n, std::size_t g) {
  if (n < 2 * g + 2) throw InsufficientSample(sample_size_message(n, g), n, 2 * g + 2);
}

}  // namespace

double estimate_kappa_c(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                        const EstimatorConfig& config) {
  check_config(config, kernel);
  const std::size_t m = kernel.degree();
  if (c < 1 || c > m) throw InvalidArgument("estimate_kappa_c: c must lie in 1..g+1");
  require_degree(2 * m - c, data.size(), "the kappa product kernel");
  if (config.mode == EstimationMode::complete) {
    return CompleteKernelTable(kernel, data, config.enumeration_budget, config.threads).kappa(c);
  }
  return kappa_incomplete(kernel, data, c, config);
}

double estimate_theta2(const ComparisonKernel& kernel, const Dataset& data, const EstimatorConfig& config) {
  check_config(config, kernel);
  require_variance_sample(data.size(), kernel.learning_size());
  if (config.mode == EstimationMode::complete) {
    return CompleteKernelTable(kernel, data, config.enumeration_budget, config.threads).theta2();
  }
  return theta2_incomplete(kernel, data, config);
}

VarianceEstimate estimate_variance(const ComparisonKernel& kernel, const Dataset& data,
                                   const EstimatorConfig& config) {
  auto estimate = estimate_comparison(kernel, data, config, true);
  return std::move(*estimate.variance);
}

ComparisonEstimate estimate_comparison(const ComparisonKernel& kernel, const Dataset& data,
                                       const EstimatorConfig& config, bool with_variance) {
  check_config(config, kernel);
  const std::size_t n = data.size();
  const std::size_t g = kernel.learning_size();
  const std::size_t m = kernel.degree();
  if (with_variance) require_variance_sample(n, g);

  ComparisonEstimate result;
  if (config.mode == EstimationMode::complete) {
    const CompleteKernelTable table(kernel, data, config.enumeration_budget, config.threads);
    result.delta_hat = table.mean();
    if (with_variance) {
      std::vector<double> kappas(m);
      for (std::size_t c = 1; c <= m; ++c) kappas[c - 1] = table.kappa(c);
      result.variance = assemble_variance(n, m, std::move(kappas), table.theta2());
    }
    return result;
  }

  result.delta_hat = estimate_delta(kernel, data, config);
  if (with_variance) {
    std::vector<double> kappas(m);
    for (std::size_t c = 1; c <= m; ++c) kappas[c - 1] = kappa_incomplete(kernel, data, c, config);
    result.variance = assemble_variance(n, m, std::move(kappas), theta2_incomplete(kernel, data, config));
  }
  return result;
}

double design_average(const ComparisonKernel& kernel, const Dataset& data, const Design& design) {
  if (design.size() == 0) throw InvalidArgument("design_average: empty design");
  CompensatedSum sum;
  if (design.kind == DesignKind::maximal) {
    for (const auto& s : design.subsets) sum.add(eval_phi0(kernel, data, s.members));
    return sum.value() / static_cast<double>(design.subsets.size());
  }
  const auto& splits = design.splits;
  std::vector<std::size_t> tests;
  std::vector<double> phi;
  for (std::size_t i = 0; i < splits.size();) {
    std::size_t j = i;
    tests.clear();
    while (j < splits.size() && splits[j].learn == splits[i].learn) tests.push_back(splits[j++].test);
    for (const std::size_t t : tests) {
      if (std::find(splits[i].learn.begin(), splits[i].learn.end(), t) != splits[i].learn.end()) {
        throw InvalidArgument("design_average: test index is also a learning index");
      }
    }
    phi.resize(tests.size());
    kernel.phi_batch(data, splits[i].learn, tests, phi);
    for (const double v : phi) sum.add(v);
    i = j;
  }
  return sum.value() / static_cast<double>(splits.size());
}

}  // namespace ucompare
