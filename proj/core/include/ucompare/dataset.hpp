#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ucompare {

/// Binary class label; always 0 or 1.
using Label = std::uint8_t;

/// One (feature vector, label) observation. Owning form used for construction.
struct Observation {
  std::vector<double> x;
  Label y = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Non-owning view of a row of a Dataset.
struct ObservationView {
  std::span<const double> x;
  Label y;
};

/// Immutable, ordered collection of observations sharing one feature dimension.
///
/// Row indices 0..n-1 are stable identifiers: index i always refers to the i-th
/// row that was ingested. Features are stored row-major in one buffer.
class Dataset {
 public:
  /// Throws InvalidArgument if `rows` is empty, a label is not 0/1, or the
  /// feature lengths disagree.
  explicit Dataset(std::span<const Observation> rows);
  Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t feature_dim);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }

  ObservationView operator[](std::size_t i) const noexcept {
    return {std::span<const double>(features_).subspan(i * feature_dim_, feature_dim_),
            labels_[i]};
  }
  std::span<const double> features(std::size_t i) const noexcept { return (*this)[i].x; }
  Label label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const Label> labels() const noexcept { return labels_; }

  Observation observation(std::size_t i) const;

  /// Dataset made of the given rows, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::size_t feature_dim_;
};

/// Which CSV column holds the label.
struct LabelColumn {
  /// Header name or 0-based column index; empty means the last column.
  std::variant<std::monostate, std::string, std::size_t> selector;

  static LabelColumn last() { return {}; }
  static LabelColumn named(std::string name) { return {std::move(name)}; }
  static LabelColumn index(std::size_t i) { return {i}; }
};

struct CsvOptions {
  LabelColumn label_column = LabelColumn::last();
  bool has_header = true;
};

/// Reads a comma-separated file. Errors name the offending 1-based row/column.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset read_csv(std::istream& in, const CsvOptions& options = {});

/// Writes features x1..xd followed by the label column y, with a header row.
/// Values use the shortest form that parses back to the same bits.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace ucompare
