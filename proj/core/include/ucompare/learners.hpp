#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "ucompare/dataset.hpp"

namespace ucompare {

/// Bounded loss on {0,1} x {0,1}, stored as a table indexed by (predicted, actual).
class Loss {
 public:
  /// table[2 * predicted + actual]; every entry must lie in [0, 1].
  explicit Loss(std::array<double, 4> table);

  static Loss misclassification();

  double operator()(Label predicted, Label actual) const noexcept {
    return table_[2 * predicted + actual];
  }

  /// This loss multiplied by factor in (0, 1].
  Loss scaled(double factor) const;

  const std::array<double, 4>& table() const noexcept { return table_; }

 private:
  std::array<double, 4> table_;
};

/// 1 if the labels differ, else 0.
double misclassification_loss(Label predicted, Label actual) noexcept;

/// Fitted prediction rule. Pure function of x.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Label predict(std::span<const double> x) const = 0;
};

/// Deterministic learning algorithm that is symmetric in its learning set: any
/// reordering of `rows` yields a predictor with identical outputs.
class Learner {
 public:
  virtual ~Learner() = default;

  /// Fits on the observations data[rows[0]], data[rows[1]], ...
  virtual std::unique_ptr<Predictor> fit(const Dataset& data,
                                         std::span<const std::size_t> rows) const = 0;

  /// The identifier accepted by parse_learner.
  virtual std::string id() const = 0;
};

using LearnerPtr = std::shared_ptr<const Learner>;

/// k-nearest neighbours with Euclidean distance.
///
/// Learning points are first sorted canonically (features lexicographically, then
/// label); distance ties go to the smaller canonical position and vote ties go to
/// label 0. If k exceeds the learning-set size every point votes.
LearnerPtr knn_learner(std::size_t k);

/// Predicts c everywhere, whatever the learning set (which may be empty).
LearnerPtr constant_learner(Label c);

/// Label of the nearer class centroid; a single-class learning set predicts that
/// class, and equal centroid distances predict 0.
LearnerPtr nearest_centroid_learner();

/// Single-feature threshold rule minimising learning-set misclassification.
///
/// Candidates are (feature, threshold, polarity) with thresholds at -inf and at the
/// midpoints between consecutive distinct feature values; polarity 0 predicts 1
/// above the threshold, polarity 1 predicts 0 above it. Ties go to the smallest
/// (feature, threshold, polarity).
LearnerPtr decision_stump_learner();

/// Parses "knn:<k>", "centroid", "stump" or "const:<0|1>".
LearnerPtr parse_learner(std::string_view id);

}  // namespace ucompare
