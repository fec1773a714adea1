#include "ucompare/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ucompare/errors.hpp"

namespace ucompare {

namespace {

void check_label(Label y, std::size_t row) {
  if (y > 1) {
    throw InvalidArgument("label of observation " + std::to_string(row + 1) + " is not 0 or 1");
  }
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view cell, std::size_t row, std::size_t column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                         ": cannot parse '" + std::string(cell) + "' as a finite real",
                     row, column);
  }
  return value;
}

std::string format_real(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

Dataset::Dataset(std::span<const Observation> rows) : feature_dim_(0) {
  if (rows.empty()) throw InvalidArgument("empty dataset");
  feature_dim_ = rows.front().x.size();
  features_.reserve(rows.size() * feature_dim_);
  labels_.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].x.size() != feature_dim_) {
      throw InvalidArgument("observation " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].x.size()) + " features, expected " +
                            std::to_string(feature_dim_));
    }
    check_label(rows[i].y, i);
    features_.insert(features_.end(), rows[i].x.begin(), rows[i].x.end());
    labels_.push_back(rows[i].y);
  }
}

Dataset::Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t feature_dim)
    : features_(std::move(features)), labels_(std::move(labels)), feature_dim_(feature_dim) {
  if (labels_.empty()) throw InvalidArgument("empty dataset");
  if (features_.size() != labels_.size() * feature_dim_) {
    throw InvalidArgument("feature buffer size does not match n * feature_dim");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) check_label(labels_[i], i);
}

Observation Dataset::observation(std::size_t i) const {
  const auto row = (*this)[i];
  return {std::vector<double>(row.x.begin(), row.x.end()), row.y};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> features;
  std::vector<Label> labels;
  features.reserve(rows.size() * feature_dim_);
  labels.reserve(rows.size());
  for (const std::size_t r : rows) {
    const auto row = (*this)[r];
    features.insert(features.end(), row.x.begin(), row.x.end());
    labels.push_back(row.y);
  }
  return Dataset(std::move(features), std::move(labels), feature_dim_);
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_number = 0;
  std::size_t columns = 0;
  std::size_t label_col = 0;

  auto resolve_label = [&](const std::vector<std::string_view>* header) {
    const auto& sel = options.label_column.selector;
    if (std::holds_alternative<std::monostate>(sel)) {
      label_col = columns - 1;
    } else if (const auto* idx = std::get_if<std::size_t>(&sel)) {
      if (*idx >= columns) {
        throw ParseError("label column index " + std::to_string(*idx) + " out of range (" +
                         std::to_string(columns) + " columns)");
      }
      label_col = *idx;
    } else {
      const auto& name = std::get<std::string>(sel);
      if (header == nullptr) throw ParseError("label column name '" + name + "' needs a header row");
      bool found = false;
      for (std::size_t c = 0; c < header->size(); ++c) {
        if (trim((*header)[c]) == name) {
          label_col = c;
          found = true;
          break;
        }
      }
      if (!found) throw ParseError("no column named '" + name + "'");
    }
  };

  std::vector<double> features;
  std::vector<Label> labels;
  bool header_pending = options.has_header;

  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);

    if (header_pending) {
      columns = fields.size();
      if (columns < 1) throw ParseError("header has no columns", line_number);
      resolve_label(&fields);
      header_pending = false;
      continue;
    }
    if (columns == 0) {
      columns = fields.size();
      resolve_label(nullptr);
    }
    if (fields.size() != columns) {
      throw ParseError("row " + std::to_string(line_number) + " has " +
                           std::to_string(fields.size()) + " columns, expected " +
                           std::to_string(columns),
                       line_number);
    }
    for (std::size_t c = 0; c < columns; ++c) {
      const double v = parse_real(fields[c], line_number, c + 1);
      if (c == label_col) {
        if (v != 0.0 && v != 1.0) {
          throw ParseError("row " + std::to_string(line_number) + ": label '" +
                               std::string(trim(fields[c])) + "' is not 0 or 1",
                           line_number, c + 1);
        }
        labels.push_back(static_cast<Label>(v));
      } else {
        features.push_back(v);
      }
    }
  }
  if (labels.empty()) throw ParseError("empty dataset");
  return Dataset(std::move(features), std::move(labels), columns - 1);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.feature_dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (const double v : data.features(i)) out << format_real(v) << ',';
    out << static_cast<int>(data.label(i)) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, data);
}

}  // namespace ucompare
