#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ucompare/estimators.hpp"
#include "ucompare/errors.hpp"
#include "ucompare/learners.hpp"
#include "ucompare/oracle.hpp"
#include "ucompare_cli/cli.hpp"

namespace ucompare::cli {
namespace {

constexpr double kTolerance = 1e-10;

struct Scenario {
  std::string name;
  std::function<DiscreteDistribution()> distribution;
  std::function<LearnerPtr()> learner_a;
  std::function<LearnerPtr()> learner_b;
  std::size_t g;
  std::size_t n;
};

DiscreteDistribution three_atoms() {
  return DiscreteDistribution({{{{0.0}, 0}, 0.4}, {{{1.0}, 1}, 0.35}, {{{2.0}, 0}, 0.25}});
}

DiscreteDistribution tied_atoms() {
  return DiscreteDistribution({{{{0.0}, 0}, 0.3}, {{{0.0}, 1}, 0.2}, {{{1.0}, 1}, 0.5}});
}

DiscreteDistribution planar_atoms() {
  return DiscreteDistribution({{{{0.0, 0.0}, 0}, 0.25},
                               {{{1.0, 0.5}, 1}, 0.25},
                               {{{0.5, 1.0}, 1}, 0.2},
                               {{{1.0, 1.0}, 0}, 0.3}});
}

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all = {
      {"three-atom/knn1-vs-const0/g1/n4", three_atoms, [] { return knn_learner(1); },
       [] { return constant_learner(0); }, 1, 4},
      {"three-atom/knn1-vs-const0/g1/n5", three_atoms, [] { return knn_learner(1); },
       [] { return constant_learner(0); }, 1, 5},
      {"tied-atom/centroid-vs-stump/g1/n4", tied_atoms, nearest_centroid_learner,
       decision_stump_learner, 1, 4},
      {"three-atom/knn1-vs-centroid/g2/n6", three_atoms, [] { return knn_learner(1); },
       nearest_centroid_learner, 2, 6},
      {"planar/knn3-vs-stump/g1/n4", planar_atoms, [] { return knn_learner(3); },
       decision_stump_learner, 1, 4},
  };
  return all;
}

EstimatorConfig complete_config(std::size_t g) {
  EstimatorConfig config;
  config.g = g;
  config.mode = EstimationMode::complete;
  return config;
}

void check_scenario(const Scenario& s, const OracleCheckOptions& options,
                    std::vector<OracleResidual>& results) {
  const DiscreteDistribution dist = s.distribution();
  const ComparisonKernel kernel(s.learner_a(), s.learner_b(), Loss::misclassification(), s.g);
  auto record = [&](const std::string& invariant, double residual) {
    results.push_back({s.name, invariant, std::abs(residual), kTolerance});
  };

  const double delta = true_delta(dist, kernel);
  record("phi0-mean-equals-delta", true_delta_symmetrized(dist, kernel) - delta);
  record("theta2-equals-delta-squared", true_theta2(dist, kernel) - delta * delta);

  const ExactMoments delta_hat = exact_estimator_moments(dist, s.n, [&](const Dataset& d) {
    return CompleteKernelTable(kernel, d).mean();
  });
  record("delta-hat-unbiased", delta_hat.mean - delta);
  record("variance-decomposition",
         delta_hat.variance - variance_from_components(dist, kernel, s.n));

  if (s.n < 2 * s.g + 2) return;
  const EstimatorConfig config = complete_config(s.g);
  const bool inject = options.inject_biased_theta2;
  const double mean_theta2 = exact_estimator_expectation(dist, s.n, [&](const Dataset& d) {
    if (!inject) return estimate_theta2(kernel, d, config);
    const double dh = estimate_delta(kernel, d, config);
    return dh * dh;
  });
  record("theta2-hat-unbiased", mean_theta2 - delta * delta);

  const double mean_v = exact_estimator_expectation(dist, s.n, [&](const Dataset& d) {
    VarianceEstimate v = estimate_variance(kernel, d, config);
    if (inject) {
      const double dh = estimate_delta(kernel, d, config);
      v.theta2_hat = dh * dh;
      v.v_hat = v.recompute();
    }
    return v.v_hat;
  });
  record("v-hat-unbiased", mean_v - delta_hat.variance);
}

}  // namespace

std::vector<std::string> oracle_scenario_names() {
  std::vector<std::string> names;
  for (const auto& s : scenarios()) names.push_back(s.name);
  return names;
}

std::vector<OracleResidual> run_oracle_checks(const OracleCheckOptions& options) {
  std::vector<OracleResidual> results;
  bool matched = false;
  for (const auto& s : scenarios()) {
    if (!options.scenario.empty() && options.scenario != s.name) continue;
    matched = true;
    check_scenario(s, options, results);
  }
  if (!matched) throw InvalidArgument("unknown scenario '" + options.scenario + "'");
  return results;
}

}  // namespace ucompare::cli
