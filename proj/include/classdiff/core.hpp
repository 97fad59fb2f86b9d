#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace classdiff {

// "c00", "c01", ... padded to the width of the largest index (minimum 2).
std::vector<std::string> make_class_names(std::size_t n_classes,
                                          std::string_view prefix = "c");

// Binary ground-truth matrix Y: rows are samples, columns are classes.
// Validated on construction; immutable afterwards, safe to share across
// threads.
class LabelMatrix {
 public:
  LabelMatrix(std::size_t n_samples, std::size_t n_classes,
              std::vector<std::uint8_t> data,
              std::vector<std::string> class_names);

  static LabelMatrix from_rows(const std::vector<std::vector<int>>& rows,
                               std::vector<std::string> class_names);

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_classes() const noexcept { return n_classes_; }

  int operator()(std::size_t sample, std::size_t cls) const {
    return data_[sample * n_classes_ + cls];
  }

  std::span<const std::uint8_t> row(std::size_t sample) const {
    return {data_.data() + sample * n_classes_, n_classes_};
  }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }

 private:
  std::size_t n_samples_;
  std::size_t n_classes_;
  std::vector<std::uint8_t> data_;
  std::vector<std::string> class_names_;
};

// Dense real matrix of per-sample descriptors (also reused for prediction
// score matrices, which share the same shape and file format).
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t n_samples, std::size_t dim,
                std::vector<double> data);

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t sample, std::size_t column) const {
    return data_[sample * dim_ + column];
  }

  std::span<const double> row(std::size_t sample) const {
    return {data_.data() + sample * dim_, dim_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t n_samples_;
  std::size_t dim_;
  std::vector<double> data_;
};

// Per-class positive counts s_i (column sums of Y).
struct ClassCounts {
  std::vector<std::size_t> counts;

  std::size_t size() const noexcept { return counts.size(); }
  std::size_t operator[](std::size_t i) const { return counts[i]; }
};

ClassCounts class_counts(const LabelMatrix& labels);

// Symmetric pair-count matrix with a zeroed diagonal.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix(std::size_t n_classes, std::vector<std::uint64_t> data);

  std::size_t n_classes() const noexcept { return n_classes_; }

  std::uint64_t operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_classes_ + j];
  }

  // Sum over columns in ascending order (exact: integer arithmetic).
  std::uint64_t row_sum(std::size_t i) const;

  const std::vector<std::uint64_t>& data() const noexcept { return data_; }

 private:
  std::size_t n_classes_;
  std::vector<std::uint64_t> data_;
};

}  // namespace classdiff
