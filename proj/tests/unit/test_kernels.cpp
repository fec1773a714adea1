#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "test_support.hpp"
#include "ucompare/errors.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/learners.hpp"
#include "ucompare/random.hpp"

using namespace ucompare;
using ucompare::fixtures::labels_only;
using ucompare::fixtures::make_dataset_1d;
using ucompare::fixtures::make_kernel;

namespace {

std::vector<std::pair<LearnerPtr, LearnerPtr>> learner_pairs() {
  return {{knn_learner(1), constant_learner(0)},
          {knn_learner(3), nearest_centroid_learner()},
          {decision_stump_learner(), knn_learner(1)},
          {nearest_centroid_learner(), decision_stump_learner()},
          {constant_learner(1), knn_learner(2)}};
}

}  // namespace

TEST(Phi, IdenticalLearnersCancel) {
  RandomStream rng(1);
  const Dataset d = fixtures::random_dataset(8, 2, rng, true);
  for (const auto& learner : {knn_learner(1), knn_learner(3), nearest_centroid_learner(),
                              decision_stump_learner()}) {
    const auto kernel = make_kernel(learner, learner, 3);
    for (std::size_t t = 3; t < 8; ++t) EXPECT_EQ(kernel.phi(d, std::vector<std::size_t>{0, 1, 2}, t), 0.0);
    const std::vector<std::size_t> window = {1, 3, 5, 7};
    EXPECT_EQ(eval_phi0(kernel, d, window), 0.0);
    const std::vector<std::size_t> two_windows = {0, 1, 2, 3, 4, 5, 6, 7};
    EXPECT_EQ(eval_theta2_kernel(kernel, d, two_windows), 0.0);
    EXPECT_EQ(eval_kappa_kernel(kernel, d, 2, std::span(two_windows).first(6)), 0.0);
  }
}

TEST(Phi, ConstantLearnersGiveOneMinusTwoY) {
  const Dataset d = labels_only({0, 1, 1, 0});
  const auto kernel = make_kernel(constant_learner(1), constant_learner(0), 1);
  for (std::size_t learn = 0; learn < 4; ++learn) {
    for (std::size_t test = 0; test < 4; ++test) {
      if (learn == test) continue;
      EXPECT_EQ(eval_phi(kernel, d, {{learn}, test}), 1.0 - 2.0 * d.label(test));
    }
  }
}

TEST(Phi, NearestNeighbourAgainstConstant) {
  const Dataset d = make_dataset_1d({0.0, 1.0, 0.9}, {0, 1, 1});
  const auto kernel = make_kernel(knn_learner(1), constant_learner(0), 2);
  EXPECT_EQ(eval_phi(kernel, d, {{0, 1}, 2}), -1.0);
}

TEST(Phi, BatchMatchesSingleEvaluations) {
  RandomStream rng(3);
  const Dataset d = fixtures::random_dataset(10, 2, rng, false);
  for (const auto& [a, b] : learner_pairs()) {
    const auto kernel = make_kernel(a, b, 4);
    const std::vector<std::size_t> learn = {7, 2, 9, 4};
    const std::vector<std::size_t> tests = {0, 1, 3, 5, 6, 8};
    std::vector<double> out(tests.size());
    kernel.phi_batch(d, learn, tests, out);
    for (std::size_t i = 0; i < tests.size(); ++i) EXPECT_EQ(out[i], kernel.phi(d, learn, tests[i]));
  }
}

TEST(Phi, ScaledLossScalesTheKernel) {
  RandomStream rng(4);
  const Dataset d = fixtures::random_dataset(6, 1, rng, false);
  const ComparisonKernel full(knn_learner(1), decision_stump_learner(), Loss::misclassification(), 2);
  const ComparisonKernel half(knn_learner(1), decision_stump_learner(),
                              Loss::misclassification().scaled(0.5), 2);
  const std::vector<std::size_t> s = {0, 3, 5};
  EXPECT_EQ(eval_phi0(half, d, s), 0.5 * eval_phi0(full, d, s));
}

TEST(Phi, ValidatesArguments) {
  EXPECT_THROW(make_kernel(nullptr, knn_learner(1), 1), InvalidArgument);
  EXPECT_THROW(make_kernel(knn_learner(1), knn_learner(1), 0), InvalidArgument);
  const Dataset d = labels_only({0, 1, 0, 1, 1});
  const auto kernel = make_kernel(knn_learner(1), constant_learner(0), 2);
  EXPECT_THROW(eval_phi(kernel, d, {{0}, 1}), InvalidArgument);
  EXPECT_THROW(eval_phi(kernel, d, {{0, 1}, 1}), InvalidArgument);
  EXPECT_THROW(eval_phi(kernel, d, {{0, 1}, 9}), InvalidArgument);
  EXPECT_THROW(eval_phi0(kernel, d, std::vector<std::size_t>{0, 1}), InvalidArgument);
  EXPECT_THROW(eval_phi0(kernel, d, std::vector<std::size_t>{0, 1, 1}), InvalidArgument);
  const std::vector<std::size_t> five = {0, 1, 2, 3, 4};
  EXPECT_THROW(eval_kappa_kernel(kernel, d, 0, five), InvalidArgument);
  EXPECT_THROW(eval_kappa_kernel(kernel, d, 4, std::span(five).first(2)), InvalidArgument);
  EXPECT_THROW(eval_kappa_kernel(kernel, d, 2, std::span(five).first(3)), InvalidArgument);
  EXPECT_THROW(eval_theta2_kernel(kernel, d, five), InvalidArgument);
}

TEST(PhiZero, TwoTermFormForGOne) {
  RandomStream rng(5);
  const Dataset d = fixtures::random_dataset(6, 1, rng, false);
  for (const auto& [a, b] : learner_pairs()) {
    const auto kernel = make_kernel(a, b, 1);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double expected = (kernel.phi(d, std::vector{j}, i) + kernel.phi(d, std::vector{i}, j)) / 2;
        EXPECT_EQ(eval_phi0(kernel, d, std::vector{i, j}), expected);
      }
    }
  }
}

TEST(PhiZero, CyclicFormEqualsFullPermutationAverage) {
  RandomStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = fixtures::random_dataset(7, 2, rng, trial % 2 == 0);
    for (const auto& [a, b] : learner_pairs()) {
      for (std::size_t g : {1, 2, 3}) {
        const auto kernel = make_kernel(a, b, g);
        std::vector<std::size_t> subset(g + 1);
        OrderedSubsetSampler sampler(d.size());
        sampler.sample(rng, subset);
        EXPECT_NEAR(eval_phi0(kernel, d, subset),
                    fixtures::phi0_all_permutations(kernel, d, subset), 1e-15);
      }
    }
  }
}

TEST(PhiZero, InvariantUnderMemberPermutation) {
  RandomStream rng(7);
  const Dataset d = fixtures::random_dataset(8, 2, rng, true);
  for (const auto& [a, b] : learner_pairs()) {
    const auto kernel = make_kernel(a, b, 3);
    std::vector<std::size_t> subset = {6, 1, 4, 2};
    const double reference = eval_phi0(kernel, d, subset);
    std::sort(subset.begin(), subset.end());
    do {
      EXPECT_EQ(eval_phi0(kernel, d, subset), reference);
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
}

TEST(KappaKernel, WindowBookkeeping) {
  RandomStream rng(8);
  const Dataset d = fixtures::random_dataset(6, 1, rng, false);
  const auto kernel = make_kernel(knn_learner(1), constant_learner(0), 1);
  const std::size_t a = 4, b = 0, e = 3;
  const std::vector<std::size_t> idx = {a, b, e};
  EXPECT_EQ(eval_kappa_kernel(kernel, d, 1, idx),
            eval_phi0(kernel, d, std::vector{a, b}) * eval_phi0(kernel, d, std::vector{b, e}));
  const std::vector<std::size_t> five = {5, 1, 3, 0, 2};
  const auto k2 = make_kernel(knn_learner(1), decision_stump_learner(), 2);
  EXPECT_EQ(eval_kappa_kernel(k2, d, 1, five),
            eval_phi0(k2, d, std::vector<std::size_t>{5, 1, 3}) *
                eval_phi0(k2, d, std::vector<std::size_t>{3, 0, 2}));
}

TEST(KappaKernel, FullOverlapIsASquare) {
  RandomStream rng(9);
  const Dataset d = fixtures::random_dataset(6, 1, rng, false);
  for (const auto& [a, b] : learner_pairs()) {
    const auto kernel = make_kernel(a, b, 2);
    const std::vector<std::size_t> s = {2, 5, 0};
    const double p = eval_phi0(kernel, d, s);
    EXPECT_EQ(eval_kappa_kernel(kernel, d, 3, s), p * p);
    EXPECT_GE(eval_kappa_kernel(kernel, d, 3, s), 0.0);
  }
}

TEST(Theta2Kernel, ConstantLearnerWindows) {
  const Dataset d = labels_only({1, 1, 0, 0});
  const auto kernel = make_kernel(constant_learner(1), constant_learner(0), 1);
  EXPECT_EQ(eval_theta2_kernel(kernel, d, std::vector<std::size_t>{0, 1, 2, 3}), -1.0);
  EXPECT_EQ(eval_theta2_kernel(kernel, d, std::vector<std::size_t>{0, 2, 1, 3}), 0.0);
}

TEST(Theta2Kernel, RandomWindowsApproximateSquaredSampleMean) {
  // Under constant learners phi0 is the window mean of 1 - 2y, so the expected
  // product over random disjoint windows is close to delta_hat^2 for large n.
  RandomStream rng(10);
  std::vector<int> y(2000);
  for (auto& v : y) v = rng.uniform01() < 0.3 ? 1 : 0;
  const Dataset d = labels_only(y);
  double mean = 0.0;
  for (int v : y) mean += 1.0 - 2.0 * v;
  mean /= static_cast<double>(y.size());
  const auto kernel = make_kernel(constant_learner(1), constant_learner(0), 2);
  OrderedSubsetSampler sampler(d.size());
  std::vector<std::size_t> idx(6);
  const int draws = 200000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    sampler.sample(rng, idx);
    sum += eval_theta2_kernel(kernel, d, idx);
  }
  EXPECT_NEAR(sum / draws, mean * mean, 0.01);
}

TEST(KernelProperties, AllEvaluationsBounded) {
  RandomStream rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset d = fixtures::random_dataset(9, 2, rng, trial % 2 == 0);
    for (const auto& [a, b] : learner_pairs()) {
      const std::size_t g = 1 + rng.uniform_below(3);
      const auto kernel = make_kernel(a, b, g);
      const std::size_t m = g + 1;
      std::vector<std::size_t> idx(2 * m);
      OrderedSubsetSampler sampler(d.size());
      sampler.sample(rng, idx);
      const double phi = kernel.phi(d, std::span(idx).first(g), idx[g]);
      EXPECT_TRUE(phi == -1.0 || phi == 0.0 || phi == 1.0);
      const double p0 = eval_phi0(kernel, d, std::span(idx).first(m));
      EXPECT_LE(std::abs(p0), 1.0);
      EXPECT_LE(std::abs(eval_theta2_kernel(kernel, d, idx)), 1.0);
      for (std::size_t c = 1; c <= m; ++c) {
        EXPECT_LE(std::abs(eval_kappa_kernel(kernel, d, c, std::span(idx).first(2 * m - c))), 1.0);
      }
    }
  }
}

TEST(PhiZeroCache, LeastRecentlyUsedEviction) {
  PhiZeroCache cache(2);
  cache.insert({0, 1}, 0.5);
  cache.insert({0, 2}, -0.5);
  ASSERT_NE(cache.find({0, 1}), nullptr);  // {0,1} becomes most recent
  cache.insert({1, 2}, 1.0);               // evicts {0,2}
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(cache.find({0, 2}), nullptr);
  ASSERT_NE(cache.find({0, 1}), nullptr);
  EXPECT_EQ(*cache.find({1, 2}), 1.0);
  EXPECT_EQ(cache.hits(), 3u);
  EXPECT_EQ(cache.misses(), 1u);
}

TEST(PhiZeroCache, ZeroCapacityStoresNothing) {
  PhiZeroCache cache(0);
  cache.insert({0, 1}, 0.5);
  EXPECT_EQ(cache.size(), 0u);
  EXPECT_EQ(cache.find({0, 1}), nullptr);
}

TEST(KernelEvaluator, MatchesDirectEvaluationWithAndWithoutCache) {
  RandomStream rng(12);
  const Dataset d = fixtures::random_dataset(9, 2, rng, true);
  const auto kernel = make_kernel(knn_learner(3), decision_stump_learner(), 2);
  KernelEvaluator cached(kernel, d, 16);
  KernelEvaluator uncached(kernel, d, 0);
  OrderedSubsetSampler sampler(d.size());
  std::vector<std::size_t> idx(6);
  for (int t = 0; t < 300; ++t) {
    sampler.sample(rng, idx);
    const double theta = eval_theta2_kernel(kernel, d, idx);
    EXPECT_EQ(cached.theta2(idx), theta);
    EXPECT_EQ(uncached.theta2(idx), theta);
    for (std::size_t c = 1; c <= 3; ++c) {
      const auto window = std::span<const std::size_t>(idx).first(6 - c);
      EXPECT_EQ(cached.kappa(c, window), eval_kappa_kernel(kernel, d, c, window));
    }
  }
  EXPECT_GT(cached.cache().hits(), 0u);
  EXPECT_LE(cached.cache().size(), 16u);
}
