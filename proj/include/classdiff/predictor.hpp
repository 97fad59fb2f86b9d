#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace classdiff {

// Ordinary least squares over class-level factor vectors, used to predict
// per-class performance before training.
struct RegressionModel {
  std::vector<double> coefficients;  // one per design column
  double intercept = 0.0;
  bool ridge_fallback = false;  // set when the normal matrix was singular

  double predict(std::span<const double> x) const;
};

// Fit with intercept via the normal equations. A singular normal matrix
// triggers a refit with ridge term 1e-8 and sets `ridge_fallback` rather than
// failing. Requires more rows than columns+1.
RegressionModel fit_ols(const std::vector<std::vector<double>>& rows,
                        std::span<const double> targets);

struct LoocvResult {
  std::vector<double> predictions;
  double pearson_pred_actual = 0.0;
};

// Leave-one-out cross validation: refit without each row in turn, predict it,
// and report the Pearson correlation between predictions and actuals.
LoocvResult loocv_predict(const std::vector<std::vector<double>>& rows,
                          std::span<const double> targets);

}  // namespace classdiff
