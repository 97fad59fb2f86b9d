#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "classdiff/core.hpp"
#include "classdiff/error.hpp"

namespace classdiff {

// Tukey box-plot summary. Quartiles use linear interpolation of the order
// statistics at position p*(n-1) ("type 7"); fences sit 1.5*IQR beyond the
// quartiles and outliers are the values strictly outside them.
struct BoxPlotStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::vector<double> outliers;  // ascending

  bool operator==(const BoxPlotStats&) const = default;
};

BoxPlotStats boxplot_stats(std::span<const double> values);

// Prefix-precision AP over a descending-score ranking; ties are broken by
// ascending original index. Requires at least one positive.
double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels);

// Mann-Whitney AUC: the probability that a random positive outranks a random
// negative, ties counting one half. Requires both a positive and a negative.
double roc_auc(std::span<const double> scores,
               std::span<const std::uint8_t> labels);

double pearson(std::span<const double> x, std::span<const double> y);

struct ClassEvaluation {
  std::string name;
  std::size_t positives = 0;
  std::optional<double> ap;
  std::optional<double> auc;
};

struct EvaluationReport {
  std::vector<ClassEvaluation> classes;
  std::optional<double> map;       // mean of the defined per-class AP values
  std::optional<double> mean_auc;  // mean of the defined per-class AUC values
  std::optional<BoxPlotStats> ap_box;
  std::optional<BoxPlotStats> auc_box;
  std::vector<Warning> warnings;   // one entry per class/metric exclusion
};

// Column-wise AP and AUC plus aggregates. Classes whose metric is undefined
// (no positives, or a single class present) are excluded from the means and
// reported as warnings instead of being scored zero.
EvaluationReport evaluate(const FeatureMatrix& predictions,
                          const LabelMatrix& labels);

}  // namespace classdiff
