#include "classdiff/core.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "classdiff/error.hpp"
#include "classdiff/lexicon.hpp"

namespace classdiff {

std::vector<std::string> make_class_names(std::size_t n_classes,
                                          std::string_view prefix) {
  std::size_t width = 2;
  for (std::size_t v = n_classes > 0 ? n_classes - 1 : 0; v >= 100; v /= 10) {
    ++width;
  }
  std::vector<std::string> names;
  names.reserve(n_classes);
  for (std::size_t i = 0; i < n_classes; ++i) {
    std::string digits = std::to_string(i);
    std::string name(prefix);
    name.append(width > digits.size() ? width - digits.size() : 0, '0');
    name += digits;
    names.push_back(std::move(name));
  }
  return names;
}

LabelMatrix::LabelMatrix(std::size_t n_samples, std::size_t n_classes,
                         std::vector<std::uint8_t> data,
                         std::vector<std::string> class_names)
    : n_samples_(n_samples),
      n_classes_(n_classes),
      data_(std::move(data)),
      class_names_(std::move(class_names)) {
  if (n_samples_ < 1 || n_classes_ < 1) {
    throw Error(ErrorCode::invalid_argument,
                "label matrix needs at least one sample and one class");
  }
  if (data_.size() != n_samples_ * n_classes_) {
    throw Error(ErrorCode::shape_mismatch,
                "label data size does not match n_samples * n_classes");
  }
  for (const auto entry : data_) {
    if (entry != 0 && entry != 1) {
      throw Error(ErrorCode::invalid_argument,
                  "label matrix entries must be 0 or 1");
    }
  }
  if (class_names_.size() != n_classes_) {
    throw Error(ErrorCode::shape_mismatch,
                "class name list length does not match n_classes");
  }
  std::set<std::string> seen;
  for (const auto& name : class_names_) {
    if (name.empty()) {
      throw Error(ErrorCode::invalid_argument, "class names must be non-empty");
    }
    if (!seen.insert(normalize_term(name)).second) {
      throw Error(ErrorCode::invalid_argument,
                  "class name '" + name + "' collides after normalization");
    }
  }
}

LabelMatrix LabelMatrix::from_rows(const std::vector<std::vector<int>>& rows,
                                   std::vector<std::string> class_names) {
  if (rows.empty()) {
    throw Error(ErrorCode::invalid_argument, "label matrix needs rows");
  }
  const std::size_t k = rows.front().size();
  std::vector<std::uint8_t> data;
  data.reserve(rows.size() * k);
  for (const auto& row : rows) {
    if (row.size() != k) {
      throw Error(ErrorCode::shape_mismatch, "ragged label rows");
    }
    for (const int value : row) {
      data.push_back(static_cast<std::uint8_t>(value));
    }
  }
  return LabelMatrix(rows.size(), k, std::move(data), std::move(class_names));
}

FeatureMatrix::FeatureMatrix(std::size_t n_samples, std::size_t dim,
                             std::vector<double> data)
    : n_samples_(n_samples), dim_(dim), data_(std::move(data)) {
  if (n_samples_ < 1 || dim_ < 1) {
    throw Error(ErrorCode::invalid_argument,
                "feature matrix needs at least one row and one column");
  }
  if (data_.size() != n_samples_ * dim_) {
    throw Error(ErrorCode::shape_mismatch,
                "feature data size does not match n_samples * dim");
  }
  for (const double value : data_) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::non_finite_value,
                  "feature matrix contains a non-finite value");
    }
  }
}

ClassCounts class_counts(const LabelMatrix& labels) {
  std::vector<std::size_t> counts(labels.n_classes(), 0);
  for (std::size_t s = 0; s < labels.n_samples(); ++s) {
    for (std::size_t c = 0; c < labels.n_classes(); ++c) {
      counts[c] += static_cast<std::size_t>(labels(s, c));
    }
  }
  return ClassCounts{std::move(counts)};
}

CooccurrenceMatrix::CooccurrenceMatrix(std::size_t n_classes,
                                       std::vector<std::uint64_t> data)
    : n_classes_(n_classes), data_(std::move(data)) {
  if (data_.size() != n_classes_ * n_classes_) {
    throw Error(ErrorCode::shape_mismatch,
                "co-occurrence data size does not match n_classes^2");
  }
  for (std::size_t i = 0; i < n_classes_; ++i) {
    if (data_[i * n_classes_ + i] != 0) {
      throw Error(ErrorCode::invalid_argument,
                  "co-occurrence diagonal must be zero");
    }
    for (std::size_t j = i + 1; j < n_classes_; ++j) {
      if (data_[i * n_classes_ + j] != data_[j * n_classes_ + i]) {
        throw Error(ErrorCode::invalid_argument,
                    "co-occurrence matrix must be symmetric");
      }
    }
  }
}

std::uint64_t CooccurrenceMatrix::row_sum(std::size_t i) const {
  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < n_classes_; ++j) {
    sum += data_[i * n_classes_ + j];
  }
  return sum;
}

}  // namespace classdiff
