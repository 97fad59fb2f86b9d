#include "classdiff/predictor.hpp"

#include <cmath>
#include <string>

#include "classdiff/error.hpp"
#include "classdiff/metrics.hpp"

namespace classdiff {

namespace {

constexpr double kRidgeLambda = 1e-8;
constexpr double kPivotTolerance = 1e-12;

// Gaussian elimination with partial pivoting on the (F+1)x(F+1) normal
// system. Returns false when a pivot collapses relative to the matrix scale.
bool solve_inplace(std::vector<double>& a, std::vector<double>& b,
                   std::size_t n) {
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(a[i * n + i]));
  }
  if (scale == 0.0) return false;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < kPivotTolerance * scale) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a[pivot * n + c], a[col * n + c]);
      }
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) {
        a[r * n + c] -= factor * a[col * n + c];
      }
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i * n + c] * b[c];
    b[i] = sum / a[i * n + i];
  }
  return true;
}

void validate_design(const std::vector<std::vector<double>>& rows,
                     std::span<const double> targets) {
  if (rows.size() != targets.size()) {
    throw Error(ErrorCode::shape_mismatch,
                "design rows and targets have different lengths");
  }
  if (rows.empty()) {
    throw Error(ErrorCode::too_few_classes, "empty design matrix");
  }
  const std::size_t f = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != f) {
      throw Error(ErrorCode::shape_mismatch, "ragged design matrix");
    }
    for (const double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite_value, "non-finite design value");
      }
    }
  }
  for (const double v : targets) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value, "non-finite target value");
    }
  }
}

}  // namespace

double RegressionModel::predict(std::span<const double> x) const {
  if (x.size() != coefficients.size()) {
    throw Error(ErrorCode::shape_mismatch,
                "feature vector length does not match model");
  }
  double value = intercept;
  for (std::size_t i = 0; i < x.size(); ++i) value += coefficients[i] * x[i];
  return value;
}

RegressionModel fit_ols(const std::vector<std::vector<double>>& rows,
                        std::span<const double> targets) {
  validate_design(rows, targets);
  const std::size_t k = rows.size();
  const std::size_t f = rows.front().size();
  if (k <= f + 1) {
    throw Error(ErrorCode::too_few_classes,
                "need more than " + std::to_string(f + 1) +
                    " classes to fit " + std::to_string(f) + " factors");
  }

  // Augmented design: factor columns then the intercept column of ones.
  const std::size_t m = f + 1;
  std::vector<double> gram(m * m, 0.0);
  std::vector<double> moment(m, 0.0);
  const auto design = [&](std::size_t row, std::size_t col) {
    return col < f ? rows[row][col] : 1.0;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < k; ++r) sum += design(r, i) * design(r, j);
      gram[i * m + j] = sum;
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) sum += design(r, i) * targets[r];
    moment[i] = sum;
  }

  RegressionModel model;
  std::vector<double> a = gram;
  std::vector<double> b = moment;
  if (!solve_inplace(a, b, m)) {
    a = gram;
    b = moment;
    for (std::size_t i = 0; i < m; ++i) a[i * m + i] += kRidgeLambda;
    if (!solve_inplace(a, b, m)) {
      throw Error(ErrorCode::invalid_argument,
                  "normal system unsolvable even with ridge term");
    }
    model.ridge_fallback = true;
  }
  model.coefficients.assign(b.begin(), b.begin() + static_cast<long>(f));
  model.intercept = b[f];
  return model;
}

LoocvResult loocv_predict(const std::vector<std::vector<double>>& rows,
                          std::span<const double> targets) {
  validate_design(rows, targets);
  const std::size_t k = rows.size();
  const std::size_t f = rows.front().size();
  if (k <= f + 2) {
    throw Error(ErrorCode::too_few_classes,
                "leave-one-out needs more than " + std::to_string(f + 2) +
                    " classes for " + std::to_string(f) + " factors");
  }

  LoocvResult result;
  result.predictions.resize(k);
  std::vector<std::vector<double>> fold_rows;
  std::vector<double> fold_targets;
  fold_rows.reserve(k - 1);
  fold_targets.reserve(k - 1);
  for (std::size_t held_out = 0; held_out < k; ++held_out) {
    fold_rows.clear();
    fold_targets.clear();
    for (std::size_t r = 0; r < k; ++r) {
      if (r == held_out) continue;
      fold_rows.push_back(rows[r]);
      fold_targets.push_back(targets[r]);
    }
    const RegressionModel model = fit_ols(fold_rows, fold_targets);
    result.predictions[held_out] = model.predict(rows[held_out]);
  }
  result.pearson_pred_actual = pearson(result.predictions, targets);
  return result;
}

}  // namespace classdiff
