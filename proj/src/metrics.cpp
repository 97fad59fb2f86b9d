#include "classdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace classdiff {

namespace {

void check_scores(std::span<const double> scores,
                  std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::length_mismatch,
                "scores and labels have different lengths");
  }
  if (scores.empty()) {
    throw Error(ErrorCode::empty_input, "empty score vector");
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::non_finite_value, "non-finite score");
    }
  }
}

}  // namespace

double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels) {
  check_scores(scores, labels);
  std::size_t total_positives = 0;
  for (const auto l : labels) total_positives += l ? 1 : 0;
  if (total_positives == 0) {
    throw Error(ErrorCode::no_positives, "average precision needs a positive");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // stable on ties: ascending original index
  });

  double sum = 0.0;
  std::size_t cumulative = 0;
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    if (labels[order[rank - 1]]) {
      ++cumulative;
      sum += static_cast<double>(cumulative) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(total_positives);
}

double roc_auc(std::span<const double> scores,
               std::span<const std::uint8_t> labels) {
  check_scores(scores, labels);
  std::size_t positives = 0;
  for (const auto l : labels) positives += l ? 1 : 0;
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::one_class_only,
                "ROC AUC needs both a positive and a negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Rank-sum with midranks for ties: every intermediate value is a
  // half-integer, so the result is bit-identical to pairwise enumeration.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) positive_rank_sum += mid_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double wins = positive_rank_sum - p * (p + 1.0) / 2.0;
  return wins / (p * static_cast<double>(negatives));
}

BoxPlotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::empty_input, "box-plot statistics need a value");
  }
  for (const double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value, "non-finite box-plot input");
    }
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  const auto quantile = [&sorted](double p) {
    const double position = p * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(position);
    const double fraction = position - static_cast<double>(lower);
    if (lower + 1 >= sorted.size()) return sorted.back();
    return sorted[lower] + fraction * (sorted[lower + 1] - sorted[lower]);
  };

  BoxPlotStats stats;
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.q1 = quantile(0.25);
  stats.median = quantile(0.5);
  stats.q3 = quantile(0.75);
  stats.iqr = stats.q3 - stats.q1;
  stats.lower_fence = stats.q1 - 1.5 * stats.iqr;
  stats.upper_fence = stats.q3 + 1.5 * stats.iqr;
  for (const double v : sorted) {
    if (v < stats.lower_fence || v > stats.upper_fence) {
      stats.outliers.push_back(v);
    }
  }
  return stats;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::length_mismatch,
                "correlation inputs have different lengths");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::length_mismatch,
                "correlation needs at least two points");
  }
  const bool x_constant = std::all_of(x.begin(), x.end(),
                                      [&](double v) { return v == x[0]; });
  const bool y_constant = std::all_of(y.begin(), y.end(),
                                      [&](double v) { return v == y[0]; });
  if (x_constant || y_constant) {
    throw Error(ErrorCode::zero_variance, "constant input has no variance");
  }

  const double n = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::zero_variance, "input has no variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

EvaluationReport evaluate(const FeatureMatrix& predictions,
                          const LabelMatrix& labels) {
  if (predictions.n_samples() != labels.n_samples() ||
      predictions.dim() != labels.n_classes()) {
    throw Error(ErrorCode::shape_mismatch,
                "prediction matrix shape does not match labels");
  }

  EvaluationReport report;
  const std::size_t n = labels.n_samples();
  const std::size_t k = labels.n_classes();

  std::vector<double> column(n);
  std::vector<std::uint8_t> truth(n);
  std::vector<double> defined_ap;
  std::vector<double> defined_auc;

  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      column[s] = predictions(s, c);
      truth[s] = static_cast<std::uint8_t>(labels(s, c));
    }
    ClassEvaluation entry;
    entry.name = labels.class_names()[c];
    entry.positives = 0;
    for (const auto t : truth) entry.positives += t ? 1 : 0;

    if (entry.positives == 0) {
      report.warnings.push_back(
          {"NO_POSITIVES", "class '" + entry.name +
                               "' has no positive samples; excluded from MAP"});
    } else {
      entry.ap = average_precision(column, truth);
      defined_ap.push_back(*entry.ap);
    }
    if (entry.positives == 0 || entry.positives == n) {
      report.warnings.push_back(
          {"ONE_CLASS_ONLY", "class '" + entry.name +
                                 "' has a single label value; excluded from "
                                 "mean AUC"});
    } else {
      entry.auc = roc_auc(column, truth);
      defined_auc.push_back(*entry.auc);
    }
    report.classes.push_back(std::move(entry));
  }

  const auto mean = [](const std::vector<double>& values) {
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  };
  if (!defined_ap.empty()) {
    report.map = mean(defined_ap);
    report.ap_box = boxplot_stats(defined_ap);
  }
  if (!defined_auc.empty()) {
    report.mean_auc = mean(defined_auc);
    report.auc_box = boxplot_stats(defined_auc);
  }
  return report;
}

}  // namespace classdiff
