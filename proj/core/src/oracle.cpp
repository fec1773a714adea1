#include "ucompare/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ucompare/designs.hpp"
#include "ucompare/errors.hpp"
#include "ucompare/numeric.hpp"

namespace ucompare {

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() < 2) throw InvalidArgument("a discrete distribution needs at least two atoms");
  const std::size_t dim = atoms_.front().observation.x.size();
  CompensatedSum total;
  for (const auto& atom : atoms_) {
    if (!(atom.probability > 0.0)) throw InvalidArgument("atom probabilities must be positive");
    if (atom.observation.x.size() != dim) throw InvalidArgument("atoms must share one feature dimension");
    if (atom.observation.y > 1) throw InvalidArgument("atom labels must be 0 or 1");
    total.add(atom.probability);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw InvalidArgument("atom probabilities must sum to 1");
  cumulative_.reserve(atoms_.size());
  double running = 0.0;
  for (const auto& atom : atoms_) cumulative_.push_back(running += atom.probability);
  cumulative_.back() = 1.0;
}

double DiscreteDistribution::positive_rate() const noexcept {
  double q = 0.0;
  for (const auto& atom : atoms_) {
    if (atom.observation.y == 1) q += atom.probability;
  }
  return q;
}

Dataset DiscreteDistribution::realize(std::span<const std::size_t> atom_indices) const {
  const std::size_t dim = atoms_.front().observation.x.size();
  std::vector<double> features;
  std::vector<Label> labels;
  features.reserve(atom_indices.size() * dim);
  labels.reserve(atom_indices.size());
  for (const std::size_t a : atom_indices) {
    const auto& obs = atoms_.at(a).observation;
    features.insert(features.end(), obs.x.begin(), obs.x.end());
    labels.push_back(obs.y);
  }
  return Dataset(std::move(features), std::move(labels), dim);
}

Dataset DiscreteDistribution::sample(std::size_t n, RandomStream& rng) const {
  std::vector<std::size_t> draws(n);
  for (auto& d : draws) {
    const double u = rng.uniform01();
    d = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                 cumulative_.begin());
    d = std::min(d, atoms_.size() - 1);
  }
  return realize(draws);
}

void for_each_atom_tuple(const DiscreteDistribution& dist, std::size_t k,
                         const std::function<void(std::span<const std::size_t>, double)>& visit,
                         std::uint64_t budget) {
  const std::size_t s = dist.support_size();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (count > budget / s) {
      throw BudgetExceeded("budget exceeded: " + std::to_string(s) + "^" + std::to_string(k) +
                           " tuples exceed the oracle budget of " + std::to_string(budget));
    }
    count *= s;
  }
  const auto& atoms = dist.atoms();
  std::vector<std::size_t> idx(k, 0);
  // prefix[i] = product of the probabilities at positions < i.
  std::vector<double> prefix(k + 1, 1.0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * atoms[0].probability;
  for (;;) {
    visit(idx, prefix[k]);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] + 1 == s) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = 0;
    for (std::size_t j = pos - 1; j < k; ++j) prefix[j + 1] = prefix[j] * atoms[idx[j]].probability;
  }
}

namespace {

std::vector<std::size_t> iota_indices(std::size_t k) {
  std::vector<std::size_t> v(k);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

double expectation_over_tuples(const DiscreteDistribution& dist, std::size_t k, std::uint64_t budget,
                               const std::function<double(const Dataset&)>& f) {
  CompensatedSum sum;
  for_each_atom_tuple(
      dist, k, [&](std::span<const std::size_t> tuple, double weight) {
        sum.add(weight * f(dist.realize(tuple)));
      },
      budget);
  return sum.value();
}

}  // namespace

double true_delta(const DiscreteDistribution& dist, const ComparisonKernel& kernel, std::uint64_t budget) {
  const std::size_t g = kernel.learning_size();
  const auto learn = iota_indices(g);
  return expectation_over_tuples(dist, g + 1, budget,
                                 [&](const Dataset& d) { return kernel.phi(d, learn, g); });
}

double true_delta_symmetrized(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                              std::uint64_t budget) {
  const auto all = iota_indices(kernel.degree());
  return expectation_over_tuples(dist, kernel.degree(), budget,
                                 [&](const Dataset& d) { return eval_phi0(kernel, d, all); });
}

double true_kappa_c(const DiscreteDistribution& dist, const ComparisonKernel& kernel, std::size_t c,
                    std::uint64_t budget) {
  const std::size_t m = kernel.degree();
  if (c < 1 || c > m) throw InvalidArgument("true_kappa_c: c must lie in 1..m");
  const auto all = iota_indices(2 * m - c);
  return expectation_over_tuples(dist, 2 * m - c, budget,
                                 [&](const Dataset& d) { return eval_kappa_kernel(kernel, d, c, all); });
}

double true_theta2(const DiscreteDistribution& dist, const ComparisonKernel& kernel, std::uint64_t budget) {
  const std::size_t m = kernel.degree();
  const auto all = iota_indices(2 * m);
  return expectation_over_tuples(dist, 2 * m, budget,
                                 [&](const Dataset& d) { return eval_theta2_kernel(kernel, d, all); });
}

ExactMoments exact_estimator_moments(const DiscreteDistribution& dist, std::size_t n,
                                     const DatasetEstimator& estimator, std::uint64_t budget) {
  std::vector<double> values;
  std::vector<double> weights;
  for_each_atom_tuple(
      dist, n, [&](std::span<const std::size_t> tuple, double weight) {
        values.push_back(estimator(dist.realize(tuple)));
        weights.push_back(weight);
      },
      budget);
  // Two passes: the centred second moment avoids E[X^2] - E[X]^2 cancellation.
  CompensatedSum mean;
  for (std::size_t i = 0; i < values.size(); ++i) mean.add(weights[i] * values[i]);
  const double mu = mean.value();
  CompensatedSum second;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mu;
    second.add(weights[i] * d * d);
  }
  return {mu, second.value()};
}

double exact_estimator_expectation(const DiscreteDistribution& dist, std::size_t n,
                                   const DatasetEstimator& estimator, std::uint64_t budget) {
  return exact_estimator_moments(dist, n, estimator, budget).mean;
}

double exact_estimator_variance(const DiscreteDistribution& dist, std::size_t n,
                                const DatasetEstimator& estimator, std::uint64_t budget) {
  return exact_estimator_moments(dist, n, estimator, budget).variance;
}

double variance_from_components(const DiscreteDistribution& dist, const ComparisonKernel& kernel,
                                std::size_t n, std::uint64_t budget) {
  const std::size_t m = kernel.degree();
  const auto w = hypergeometric_weights(n, m);
  const double delta = true_delta(dist, kernel, budget);
  CompensatedSum sum;
  for (std::size_t c = 1; c <= m; ++c) {
    if (w.alpha[c] != 0.0) sum.add(w.alpha[c] * true_kappa_c(dist, kernel, c, budget));
  }
  sum.add(-(1.0 - w.alpha[0]) * delta * delta);
  return sum.value();
}

}  // namespace ucompare
