#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "classdiff/core.hpp"

namespace classdiff {

// Sigmoid linear classifier: one weight row and bias per class.
struct LinearModel {
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  // n_classes x dim, row-major
  std::vector<double> bias;     // n_classes
};

struct TrainConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  std::size_t batch_size = 28;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  // Absent means all ones. Zero entries are allowed and freeze that class.
  std::optional<std::vector<double>> class_weights;
};

// Predictions are clamped into [kProbClamp, 1 - kProbClamp] before the logs.
inline constexpr double kProbClamp = 1e-7;

// L = -sum_j w_j * (S_j log p_j + (1 - S_j) log(1 - p_j)).
// With unit weights this is the plain multi-label binary cross entropy.
double weighted_bce(std::span<const double> predictions,
                    std::span<const std::uint8_t> targets,
                    std::span<const double> weights);

// Componentwise sigmoid(Wx + b), computed branch-stably for large |z|.
std::vector<double> forward(const LinearModel& model,
                            std::span<const double> x);

struct Gradients {
  std::vector<double> d_weights;
  std::vector<double> d_bias;
};

// Mean over the batch of the per-sample gradients. For sigmoid + BCE the
// per-class logit gradient is w_j * (p_j - S_j).
Gradients gradient(const LinearModel& model, const FeatureMatrix& features,
                   const LabelMatrix& labels,
                   std::span<const std::size_t> batch,
                   std::span<const double> class_weights);

struct TrainResult {
  LinearModel model;
  std::vector<double> loss_trace;  // mean batch loss per iteration
};

// Momentum SGD (v <- mu*v + g; theta <- theta - lr*v) over seeded-shuffle
// mini-batches. Bit-identical results for identical inputs and config.
TrainResult train(const LabelMatrix& labels, const FeatureMatrix& features,
                  const TrainConfig& config);

// Model scores for every sample; reuses FeatureMatrix as an N x K container.
FeatureMatrix predict_all(const LinearModel& model,
                          const FeatureMatrix& features);

// Checkpoint format DWLM1: magic "DWLM1", u32 LE n_classes, u32 LE dim,
// n_classes*dim f64 LE weights (row-major), n_classes f64 LE biases.
void save_model(const std::string& path, const LinearModel& model);
LinearModel load_model(const std::string& path);

}  // namespace classdiff
