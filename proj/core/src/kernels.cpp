#include "ucompare/kernels.hpp"

#include <algorithm>
#include <string>

#include "ucompare/errors.hpp"

namespace ucompare {

ComparisonKernel::ComparisonKernel(LearnerPtr learner_a, LearnerPtr learner_b, Loss loss, std::size_t g)
    : a_(std::move(learner_a)), b_(std::move(learner_b)), loss_(loss), g_(g) {
  if (!a_ || !b_) throw InvalidArgument("ComparisonKernel: null learner");
  if (g_ == 0) throw InvalidArgument("ComparisonKernel: learning-set size g must be at least 1");
}

void ComparisonKernel::phi_batch(const Dataset& data, std::span<const std::size_t> learn,
                                 std::span<const std::size_t> tests, std::span<double> out) const {
  if (learn.size() != g_) {
    throw InvalidArgument("phi: learning set has " + std::to_string(learn.size()) +
                          " indices, expected g = " + std::to_string(g_));
  }
  const auto fa = a_->fit(data, learn);
  const auto fb = b_->fit(data, learn);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const auto z = data[tests[i]];
    out[i] = loss_(fa->predict(z.x), z.y) - loss_(fb->predict(z.x), z.y);
  }
}

double ComparisonKernel::phi(const Dataset& data, std::span<const std::size_t> learn,
                             std::size_t test) const {
  double value = 0.0;
  phi_batch(data, learn, std::span<const std::size_t>(&test, 1), std::span<double>(&value, 1));
  return value;
}

namespace {

void check_distinct_in_range(std::span<const std::size_t> indices, std::size_t n, const char* who) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= n) {
      throw InvalidArgument(std::string(who) + ": index " + std::to_string(indices[i]) +
                            " out of range for n = " + std::to_string(n));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (indices[j] == indices[i]) {
        throw InvalidArgument(std::string(who) + ": repeated index " + std::to_string(indices[i]));
      }
    }
  }
}

}  // namespace

double eval_phi(const ComparisonKernel& kernel, const Dataset& data, const OrderedSplit& split) {
  std::vector<std::size_t> all(split.learn);
  all.push_back(split.test);
  check_distinct_in_range(all, data.size(), "eval_phi");
  return kernel.phi(data, split.learn, split.test);
}

double eval_phi0(const ComparisonKernel& kernel, const Dataset& data,
                 std::span<const std::size_t> subset) {
  const std::size_t m = kernel.degree();
  if (subset.size() != m) {
    throw InvalidArgument("eval_phi0: subset has " + std::to_string(subset.size()) +
                          " indices, expected g + 1 = " + std::to_string(m));
  }
  check_distinct_in_range(subset, data.size(), "eval_phi0");
  std::vector<std::size_t> learn(m - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(subset.begin(), subset.begin() + static_cast<std::ptrdiff_t>(i), learn.begin());
    std::copy(subset.begin() + static_cast<std::ptrdiff_t>(i) + 1, subset.end(),
              learn.begin() + static_cast<std::ptrdiff_t>(i));
    sum += kernel.phi(data, learn, subset[i]);
  }
  return sum / static_cast<double>(m);
}

namespace {

void check_kappa_args(std::size_t m, std::size_t c, std::size_t length) {
  if (c < 1 || c > m) {
    throw InvalidArgument("kappa kernel: overlap c = " + std::to_string(c) + " outside 1.." +
                          std::to_string(m));
  }
  if (length != 2 * m - c) {
    throw InvalidArgument("kappa kernel: expected " + std::to_string(2 * m - c) + " indices, got " +
                          std::to_string(length));
  }
}

void check_theta2_args(std::size_t m, std::size_t length) {
  if (length != 2 * m) {
    throw InvalidArgument("theta2 kernel: expected " + std::to_string(2 * m) + " indices, got " +
                          std::to_string(length));
  }
}

}  // namespace

double eval_kappa_kernel(const ComparisonKernel& kernel, const Dataset& data, std::size_t c,
                         std::span<const std::size_t> indices) {
  const std::size_t m = kernel.degree();
  check_kappa_args(m, c, indices.size());
  return eval_phi0(kernel, data, indices.first(m)) * eval_phi0(kernel, data, indices.subspan(m - c, m));
}

double eval_theta2_kernel(const ComparisonKernel& kernel, const Dataset& data,
                          std::span<const std::size_t> indices) {
  const std::size_t m = kernel.degree();
  check_theta2_args(m, indices.size());
  return eval_phi0(kernel, data, indices.first(m)) * eval_phi0(kernel, data, indices.subspan(m, m));
}

std::size_t PhiZeroCache::KeyHash::operator()(const std::vector<std::size_t>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const std::size_t v : key) h = (h ^ v) * 0x100000001b3ULL;
  return h;
}

const double* PhiZeroCache::find(const std::vector<std::size_t>& key) {
  const auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return nullptr;
  }
  ++hits_;
  order_.splice(order_.begin(), order_, it->second);
  return &it->second->second;
}

void PhiZeroCache::insert(std::vector<std::size_t> key, double value) {
  if (capacity_ == 0) return;
  if (const auto it = index_.find(key); it != index_.end()) {
    it->second->second = value;
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  if (index_.size() >= capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
  order_.emplace_front(std::move(key), value);
  index_.emplace(order_.front().first, order_.begin());
}

KernelEvaluator::KernelEvaluator(const ComparisonKernel& kernel, const Dataset& data,
                                 std::size_t cache_capacity)
    : kernel_(kernel), data_(data), cache_(cache_capacity) {}

double KernelEvaluator::phi0(std::span<const std::size_t> subset) {
  // Always evaluate on the sorted key: the value then cannot depend on argument
  // order or on whether it came from the cache.
  key_.assign(subset.begin(), subset.end());
  std::sort(key_.begin(), key_.end());
  if (cache_.capacity() == 0) return eval_phi0(kernel_, data_, key_);
  if (const double* hit = cache_.find(key_)) return *hit;
  const double value = eval_phi0(kernel_, data_, key_);
  cache_.insert(key_, value);
  return value;
}

double KernelEvaluator::kappa(std::size_t c, std::span<const std::size_t> indices) {
  const std::size_t m = kernel_.degree();
  check_kappa_args(m, c, indices.size());
  const double left = phi0(indices.first(m));
  return left * phi0(indices.subspan(m - c, m));
}

double KernelEvaluator::theta2(std::span<const std::size_t> indices) {
  const std::size_t m = kernel_.degree();
  check_theta2_args(m, indices.size());
  const double left = phi0(indices.first(m));
  return left * phi0(indices.subspan(m, m));
}

}  // namespace ucompare
