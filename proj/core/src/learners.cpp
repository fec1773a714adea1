#include "ucompare/learners.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <vector>

#include "ucompare/errors.hpp"

namespace ucompare {

Loss::Loss(std::array<double, 4> table) : table_(table) {
  for (const double v : table_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("loss values must lie in [0, 1]");
  }
}

Loss Loss::misclassification() { return Loss({0.0, 1.0, 1.0, 0.0}); }

Loss Loss::scaled(double factor) const {
  if (!(factor > 0.0 && factor <= 1.0)) throw InvalidArgument("loss scale must lie in (0, 1]");
  auto t = table_;
  for (double& v : t) v *= factor;
  return Loss(t);
}

double misclassification_loss(Label predicted, Label actual) noexcept {
  return predicted != actual ? 1.0 : 0.0;
}

namespace {

void require_nonempty(std::span<const std::size_t> rows, const char* who) {
  if (rows.empty()) throw InvalidArgument(std::string(who) + ": cannot fit on an empty learning set");
}

void require_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) {
    throw InvalidArgument("predict: expected " + std::to_string(dim) + " features, got " +
                          std::to_string(x.size()));
  }
}

// Learning rows sorted by (features lexicographically, label). Learners that
// accumulate floating-point sums or break ties by position work in this order, so
// their output cannot depend on how the caller ordered the learning set.
std::vector<std::size_t> canonical_order(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto xa = data.features(a);
    const auto xb = data.features(b);
    if (std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(), xb.end())) return true;
    if (std::lexicographical_compare(xb.begin(), xb.end(), xa.begin(), xa.end())) return false;
    return data.label(a) < data.label(b);
  });
  return order;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(Label c) : c_(c) {}
  Label predict(std::span<const double>) const override { return c_; }

 private:
  Label c_;
};

class ConstantLearner final : public Learner {
 public:
  explicit ConstantLearner(Label c) : c_(c) {}
  std::unique_ptr<Predictor> fit(const Dataset&, std::span<const std::size_t>) const override {
    return std::make_unique<ConstantPredictor>(c_);
  }
  std::string id() const override { return "const:" + std::to_string(c_); }

 private:
  Label c_;
};

class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(std::size_t k, std::size_t dim, std::vector<double> points, std::vector<Label> labels)
      : k_(std::min(k, labels.size())), dim_(dim), points_(std::move(points)), labels_(std::move(labels)) {}

  Label predict(std::span<const double> x) const override {
    require_dim(x, dim_);
    const std::size_t count = labels_.size();
    std::vector<std::pair<double, std::size_t>> ranked(count);
    for (std::size_t i = 0; i < count; ++i) {
      ranked[i] = {squared_distance(x, std::span<const double>(points_).subspan(i * dim_, dim_)), i};
    }
    // Pairs compare by distance first, then canonical position.
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k_), ranked.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k_; ++i) ones += labels_[ranked[i].second];
    return 2 * ones > k_ ? Label{1} : Label{0};
  }

 private:
  std::size_t k_;
  std::size_t dim_;
  std::vector<double> points_;
  std::vector<Label> labels_;
};

class KnnLearner final : public Learner {
 public:
  explicit KnnLearner(std::size_t k) : k_(k) {
    if (k == 0) throw InvalidArgument("knn: k must be at least 1");
  }

  std::unique_ptr<Predictor> fit(const Dataset& data, std::span<const std::size_t> rows) const override {
    require_nonempty(rows, "knn");
    const auto order = canonical_order(data, rows);
    std::vector<double> points;
    std::vector<Label> labels;
    points.reserve(order.size() * data.feature_dim());
    labels.reserve(order.size());
    for (const std::size_t r : order) {
      const auto row = data[r];
      points.insert(points.end(), row.x.begin(), row.x.end());
      labels.push_back(row.y);
    }
    return std::make_unique<KnnPredictor>(k_, data.feature_dim(), std::move(points), std::move(labels));
  }

  std::string id() const override { return "knn:" + std::to_string(k_); }

 private:
  std::size_t k_;
};

class CentroidPredictor final : public Predictor {
 public:
  CentroidPredictor(std::vector<double> c0, std::vector<double> c1, std::size_t n0, std::size_t n1)
      : c0_(std::move(c0)), c1_(std::move(c1)), n0_(n0), n1_(n1) {}

  Label predict(std::span<const double> x) const override {
    require_dim(x, c0_.size());
    if (n1_ == 0) return 0;
    if (n0_ == 0) return 1;
    return squared_distance(x, c1_) < squared_distance(x, c0_) ? Label{1} : Label{0};
  }

 private:
  std::vector<double> c0_;
  std::vector<double> c1_;
  std::size_t n0_;
  std::size_t n1_;
};

class CentroidLearner final : public Learner {
 public:
  std::unique_ptr<Predictor> fit(const Dataset& data, std::span<const std::size_t> rows) const override {
    require_nonempty(rows, "centroid");
    const std::size_t dim = data.feature_dim();
    std::vector<double> sum0(dim, 0.0), sum1(dim, 0.0);
    std::size_t n0 = 0, n1 = 0;
    for (const std::size_t r : canonical_order(data, rows)) {
      const auto row = data[r];
      auto& sum = row.y == 1 ? sum1 : sum0;
      (row.y == 1 ? n1 : n0) += 1;
      for (std::size_t j = 0; j < dim; ++j) sum[j] += row.x[j];
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (n0 > 0) sum0[j] /= static_cast<double>(n0);
      if (n1 > 0) sum1[j] /= static_cast<double>(n1);
    }
    return std::make_unique<CentroidPredictor>(std::move(sum0), std::move(sum1), n0, n1);
  }

  std::string id() const override { return "centroid"; }
};

class StumpPredictor final : public Predictor {
 public:
  StumpPredictor(std::size_t dim, std::size_t feature, double threshold, int polarity)
      : dim_(dim), feature_(feature), threshold_(threshold), polarity_(polarity) {}

  Label predict(std::span<const double> x) const override {
    require_dim(x, dim_);
    const bool above = dim_ > 0 && x[feature_] > threshold_;
    return static_cast<Label>(above == (polarity_ == 0));
  }

 private:
  std::size_t dim_;
  std::size_t feature_;
  double threshold_;
  int polarity_;
};

class StumpLearner final : public Learner {
 public:
  std::unique_ptr<Predictor> fit(const Dataset& data, std::span<const std::size_t> rows) const override {
    require_nonempty(rows, "stump");
    const std::size_t dim = data.feature_dim();
    std::size_t total_ones = 0;
    for (const std::size_t r : rows) total_ones += data.label(r);
    const std::size_t total_zeros = rows.size() - total_ones;

    if (dim == 0) {
      // No feature to split on: threshold -inf, polarity chosen by majority (tie -> 0).
      return std::make_unique<StumpPredictor>(0, 0, -std::numeric_limits<double>::infinity(),
                                              total_ones > total_zeros ? 1 : 0);
    }

    constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
    std::size_t best_errors = std::numeric_limits<std::size_t>::max();
    std::size_t best_feature = 0;
    double best_threshold = kMinusInf;
    int best_polarity = 0;

    auto consider = [&](std::size_t feature, double threshold, std::size_t ones_above,
                        std::size_t zeros_above) {
      const std::size_t ones_below = total_ones - ones_above;
      const std::size_t zeros_below = total_zeros - zeros_above;
      const std::size_t errors[2] = {zeros_above + ones_below, ones_above + zeros_below};
      for (int polarity = 0; polarity < 2; ++polarity) {
        if (errors[polarity] < best_errors) {
          best_errors = errors[polarity];
          best_feature = feature;
          best_threshold = threshold;
          best_polarity = polarity;
        }
      }
    };

    std::vector<std::pair<double, Label>> column(rows.size());
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        column[i] = {data.features(rows[i])[j], data.label(rows[i])};
      }
      std::sort(column.begin(), column.end());
      consider(j, kMinusInf, total_ones, total_zeros);
      std::size_t ones_below = 0, zeros_below = 0;
      for (std::size_t i = 0; i < column.size(); ++i) {
        (column[i].second == 1 ? ones_below : zeros_below) += 1;
        const bool boundary = i + 1 < column.size() && column[i + 1].first > column[i].first;
        if (!boundary) continue;
        const double lo = column[i].first;
        const double hi = column[i + 1].first;
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        consider(j, threshold, total_ones - ones_below, total_zeros - zeros_below);
      }
    }
    return std::make_unique<StumpPredictor>(dim, best_feature, best_threshold, best_polarity);
  }

  std::string id() const override { return "stump"; }
};

std::size_t parse_count(std::string_view text, std::string_view id) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("bad learner identifier '" + std::string(id) + "'");
  }
  return value;
}

}  // namespace

LearnerPtr knn_learner(std::size_t k) { return std::make_shared<KnnLearner>(k); }

LearnerPtr constant_learner(Label c) {
  if (c > 1) throw InvalidArgument("constant learner label must be 0 or 1");
  return std::make_shared<ConstantLearner>(c);
}

LearnerPtr nearest_centroid_learner() { return std::make_shared<CentroidLearner>(); }

LearnerPtr decision_stump_learner() { return std::make_shared<StumpLearner>(); }

LearnerPtr parse_learner(std::string_view id) {
  if (id == "centroid") return nearest_centroid_learner();
  if (id == "stump") return decision_stump_learner();
  if (id.starts_with("knn:")) return knn_learner(parse_count(id.substr(4), id));
  if (id.starts_with("const:")) {
    const std::size_t c = parse_count(id.substr(6), id);
    if (c > 1) throw InvalidArgument("bad learner identifier '" + std::string(id) + "'");
    return constant_learner(static_cast<Label>(c));
  }
  throw InvalidArgument("unknown learner '" + std::string(id) +
                        "' (expected knn:<k>, centroid, stump or const:<0|1>)");
}

}  // namespace ucompare
