#include "ucompare_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ucompare/dataset.hpp"
#include "ucompare/designs.hpp"
#include "ucompare/errors.hpp"
#include "ucompare/estimators.hpp"
#include "ucompare/inference.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/learners.hpp"
#include "ucompare/random.hpp"

namespace ucompare::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kThreadsEnv = "UCOMPARE_THREADS";
constexpr unsigned kDefaultDigits = 2;

struct CompareFlags {
  std::string data;
  std::string learner_a;
  std::string learner_b;
  std::size_t g = 0;
  std::optional<unsigned> digits;
  std::optional<std::uint64_t> iterations;
  std::string seed = "0";
  double alpha = 0.05;
  std::string variance_mode = "unbiased";
  bool complete = false;
  std::string label_col;
  bool no_header = false;
  std::optional<std::size_t> threads;
  bool no_variance = false;
};

struct OracleFlags {
  bool list = false;
  bool inject_biased_theta2 = false;
  std::string scenario;
};

struct WeightsFlags {
  std::size_t n = 0;
  std::size_t m = 0;
};

struct DesignFlags {
  std::string kind = "kfold";
  std::size_t n = 0;
  std::size_t g = 0;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
};

std::optional<std::string> env_value(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || text.front() == '-') {
    throw InvalidArgument(what + " must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "random") {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
  }
  return parse_size(text, "--seed");
}

LabelColumn resolve_label_column(const std::string& text) {
  if (text.empty()) return LabelColumn::last();
  const bool numeric = text.find_first_not_of("0123456789") == std::string::npos;
  return numeric ? LabelColumn::index(parse_size(text, "--label-col")) : LabelColumn::named(text);
}

std::size_t resolve_threads(const CompareFlags& flags) {
  if (flags.threads) return *flags.threads;
  if (auto env = env_value(kThreadsEnv)) return parse_size(*env, kThreadsEnv);
  return 0;
}

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json vector_json(const std::vector<double>& values) {
  Json array = Json::array();
  for (double v : values) array.push_back(number_or_null(v));
  return array;
}

void write_json(std::ostream& out, const Json& document) {
  out << document.dump(2) << '\n';
}

int cmd_compare(const CompareFlags& flags, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();

  const VarianceMode mode = parse_variance_mode(flags.variance_mode);
  if (!(flags.alpha > 0.0 && flags.alpha < 1.0)) {
    throw InvalidArgument("--alpha must lie in (0, 1)");
  }
  if (flags.g == 0) throw InvalidArgument("--g must be at least 1");

  std::optional<unsigned> digits = flags.digits;
  if (digits && flags.iterations) {
    err << "warning: --digits overrides --iterations\n";
  }
  if (!digits && !flags.iterations) digits = kDefaultDigits;
  const std::uint64_t budget = digits ? iterations_for_digits(*digits) : *flags.iterations;
  if (budget == 0) throw InvalidArgument("--iterations must be positive");

  const std::uint64_t seed = resolve_seed(flags.seed);
  const std::size_t threads = resolve_threads(flags);

  CsvOptions csv;
  csv.label_column = resolve_label_column(flags.label_col);
  csv.has_header = !flags.no_header;
  const Dataset data = load_csv(flags.data, csv);
  const std::size_t n = data.size();
  err << "loaded " << n << " observations with " << data.feature_dim() << " features\n";

  const LearnerPtr learner_a = parse_learner(flags.learner_a);
  const LearnerPtr learner_b = parse_learner(flags.learner_b);
  const ComparisonKernel kernel(learner_a, learner_b, Loss::misclassification(), flags.g);

  const bool with_variance = !flags.no_variance;
  if (with_variance && n < 2 * flags.g + 2) {
    err << "error: the unbiased variance estimator requires n >= 2g + 2 (n = " << n
        << ", g = " << flags.g << ", so g <= " << (n >= 2 ? (n - 2) / 2 : 0)
        << " is needed); pass --no-variance for the point estimate only\n";
    return kExitInsufficientSample;
  }

  EstimatorConfig config;
  config.g = flags.g;
  config.n_delta = config.n_kappa = config.n_theta2 = budget;
  config.seed = seed;
  config.mode = flags.complete ? EstimationMode::complete : EstimationMode::incomplete;
  config.threads = threads;

  err << "estimating (" << (flags.complete ? "complete" : "incomplete") << " mode)\n";
  const ComparisonEstimate estimate = estimate_comparison(kernel, data, config, with_variance);

  Json inputs;
  inputs["data"] = flags.data;
  inputs["learner_a"] = learner_a->id();
  inputs["learner_b"] = learner_b->id();
  inputs["g"] = flags.g;
  inputs["n"] = n;
  inputs["mode"] = flags.complete ? "complete" : "incomplete";
  inputs["digits"] = digits ? Json(*digits) : Json(nullptr);
  inputs["budgets"] = {{"delta", budget}, {"kappa", budget}, {"theta2", budget}};
  inputs["seed"] = seed;
  inputs["variance_mode"] = std::string(to_string(mode));
  inputs["alpha"] = flags.alpha;
  inputs["variance_requested"] = with_variance;

  Json outputs;
  outputs["delta_hat"] = estimate.delta_hat;
  int exit_code = kExitOk;
  if (estimate.variance) {
    const VarianceEstimate& v = *estimate.variance;
    const TestResult test = test_comparison(estimate.delta_hat, v, n, flags.g, flags.alpha, mode);
    outputs["kappa_hats"] = vector_json(v.kappa_hats);
    outputs["theta2_hat"] = v.theta2_hat;
    outputs["zeta_hats"] = vector_json(v.zeta_hats());
    outputs["alpha_weights"] = vector_json(v.alpha.alpha);
    outputs["v_hat"] = v.v_hat;
    outputs["v_hat_nonpositive"] = v.nonpositive;
    outputs["variance_mode_used"] = std::string(to_string(test.mode_used));
    outputs["u_n"] = test.u_n;
    outputs["statistic"] = number_or_null(test.statistic);
    outputs["p_value"] = number_or_null(test.p_value);
    outputs["ci"] = test.degenerate ? Json(nullptr)
                                    : Json::array({test.ci_low, test.ci_high});
    outputs["decision"] = !test.reject ? Json(nullptr)
                                       : Json(*test.reject ? "reject" : "fail_to_reject");
    outputs["degenerate"] = test.degenerate;
    if (v.nondegenerate(config.nondegeneracy_tolerance)) {
      outputs["nondegeneracy_warning"] = nullptr;
    } else {
      std::ostringstream warning;
      warning << "kappa_1_hat - theta2_hat = " << std::setprecision(17)
              << v.kappa(1) - v.theta2_hat << " is not above "
              << config.nondegeneracy_tolerance
              << "; the normal approximation may not hold";
      outputs["nondegeneracy_warning"] = warning.str();
    }
    if (test.degenerate) {
      err << "degenerate variance: no decision\n";
      exit_code = kExitDegenerate;
    } else if (test.mode_used != mode) {
      err << "warning: v_hat <= 0, fell back to the plug-in variance\n";
    }
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  Json provenance;
  provenance["version"] = UCOMPARE_VERSION;
  provenance["rng_algorithm"] = std::string(kRngAlgorithm);
  const auto threads_env = env_value(kThreadsEnv);
  provenance["threads_env"] = threads_env ? Json(*threads_env) : Json(nullptr);
  provenance["wall_time_seconds"] = elapsed.count();

  Json report;
  report["schema"] = 1;
  report["inputs"] = std::move(inputs);
  report["outputs"] = std::move(outputs);
  report["provenance"] = std::move(provenance);
  write_json(out, report);
  return exit_code;
}

int cmd_oracle_check(const OracleFlags& flags, std::ostream& out) {
  if (flags.list) {
    for (const auto& name : oracle_scenario_names()) out << name << '\n';
    return kExitOk;
  }
  OracleCheckOptions options;
  options.inject_biased_theta2 = flags.inject_biased_theta2;
  options.scenario = flags.scenario;
  const auto results = run_oracle_checks(options);
  std::size_t failures = 0;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.scenario << ' ' << r.invariant
        << " residual=" << std::setprecision(3) << std::scientific << r.residual
        << " tolerance=" << r.tolerance << std::defaultfloat << '\n';
    if (!r.passed()) ++failures;
  }
  out << results.size() - failures << '/' << results.size() << " invariants passed\n";
  return failures == 0 ? kExitOk : kExitError;
}

int cmd_weights(const WeightsFlags& flags, std::ostream& out) {
  out << weights_to_json(hypergeometric_weights(flags.n, flags.m)) << '\n';
  return kExitOk;
}

int cmd_design(const DesignFlags& flags, std::ostream& out) {
  Design design;
  if (flags.kind == "kfold") {
    design = kfold_design(flags.n, flags.g);
  } else if (flags.kind == "maximal") {
    design = maximal_design(flags.n, flags.g + 1);
  } else if (flags.kind == "random") {
    design = random_design(flags.n, flags.g, flags.draws, flags.seed);
  } else {
    throw InvalidArgument("unknown design kind '" + flags.kind + "'");
  }
  write_design(out, design);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare two learning algorithms by their unconditional error rates"};
  app.set_version_flag("--version", UCOMPARE_VERSION);
  app.require_subcommand(1);

  CompareFlags compare;
  auto* cmp = app.add_subcommand("compare", "Estimate the error difference and test it");
  cmp->add_option("--data", compare.data, "CSV file of observations")->required();
  cmp->add_option("--learner-a", compare.learner_a, "knn:<k>, centroid, stump or const:<0|1>")
      ->required();
  cmp->add_option("--learner-b", compare.learner_b, "Second learner")->required();
  cmp->add_option("--g", compare.g, "Learning-set size")->required();
  cmp->add_option("--digits", compare.digits, "Guaranteed digits; budget 10^(2d+1)");
  cmp->add_option("--iterations", compare.iterations, "Monte Carlo budget per statistic");
  cmp->add_option("--seed", compare.seed, "Integer seed or 'random'")->capture_default_str();
  cmp->add_option("--alpha", compare.alpha, "Test level")->capture_default_str();
  cmp->add_option("--variance-mode", compare.variance_mode, "unbiased or plugin")
      ->capture_default_str();
  cmp->add_flag("--complete", compare.complete, "Enumerate every subset");
  cmp->add_option("--label-col", compare.label_col, "Label column name or 0-based index");
  cmp->add_flag("--no-header", compare.no_header, "The CSV has no header row");
  cmp->add_option("--threads", compare.threads,
                  std::string("Worker threads (default $") + kThreadsEnv +
                      ", else all cores)");
  cmp->add_flag("--no-variance", compare.no_variance, "Point estimate only");

  OracleFlags oracle;
  auto* orc = app.add_subcommand("oracle-check", "Check estimator invariants on tiny scenarios");
  orc->add_flag("--list", oracle.list, "List scenarios without running them");
  orc->add_flag("--inject-biased-theta2", oracle.inject_biased_theta2,
                "Use delta_hat^2 for theta^2 (must fail)");
  orc->add_option("--scenario", oracle.scenario, "Run one scenario");

  WeightsFlags weights;
  auto* wts = app.add_subcommand("weights", "Print hypergeometric weights as JSON");
  wts->add_option("--n", weights.n)->required();
  wts->add_option("--m", weights.m)->required();

  DesignFlags design;
  auto* dsg = app.add_subcommand("design", "Print a design in audit format");
  dsg->add_option("--kind", design.kind, "kfold, maximal or random")->capture_default_str();
  dsg->add_option("--n", design.n)->required();
  dsg->add_option("--g", design.g)->required();
  dsg->add_option("--draws", design.draws, "Random design size");
  dsg->add_option("--seed", design.seed, "Random design seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*cmp) return cmd_compare(compare, out, err);
    if (*orc) return cmd_oracle_check(oracle, out);
    if (*wts) return cmd_weights(weights, out);
    if (*dsg) return cmd_design(design, out);
  } catch (const InsufficientSample& e) {
    err << "error: " << e.what() << '\n';
    return kExitInsufficientSample;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ucompare");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ucompare::cli
