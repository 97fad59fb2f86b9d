#include "classdiff/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "classdiff/error.hpp"
#include "classdiff/rng.hpp"

namespace classdiff {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_class_weights(std::span<const double> weights, std::size_t k) {
  if (weights.size() != k) {
    throw Error(ErrorCode::shape_mismatch,
                "class weight vector length does not match n_classes");
  }
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  "class weights must be finite and non-negative");
    }
  }
}

}  // namespace

double weighted_bce(std::span<const double> predictions,
                    std::span<const std::uint8_t> targets,
                    std::span<const double> weights) {
  if (predictions.size() != targets.size() ||
      predictions.size() != weights.size()) {
    throw Error(ErrorCode::shape_mismatch,
                "prediction, target and weight lengths differ");
  }
  double loss = 0.0;
  for (std::size_t j = 0; j < predictions.size(); ++j) {
    const double p =
        std::clamp(predictions[j], kProbClamp, 1.0 - kProbClamp);
    const double term =
        targets[j] ? std::log(p) : std::log1p(-p);
    loss -= weights[j] * term;
  }
  return loss;
}

std::vector<double> forward(const LinearModel& model,
                            std::span<const double> x) {
  if (x.size() != model.dim) {
    throw Error(ErrorCode::shape_mismatch,
                "input dimension does not match model");
  }
  std::vector<double> out(model.n_classes);
  for (std::size_t j = 0; j < model.n_classes; ++j) {
    double z = model.bias[j];
    const double* row = model.weights.data() + j * model.dim;
    for (std::size_t t = 0; t < model.dim; ++t) z += row[t] * x[t];
    out[j] = sigmoid(z);
  }
  return out;
}

Gradients gradient(const LinearModel& model, const FeatureMatrix& features,
                   const LabelMatrix& labels,
                   std::span<const std::size_t> batch,
                   std::span<const double> class_weights) {
  if (batch.empty()) {
    throw Error(ErrorCode::empty_input, "gradient needs a non-empty batch");
  }
  check_class_weights(class_weights, model.n_classes);

  Gradients grads;
  grads.d_weights.assign(model.n_classes * model.dim, 0.0);
  grads.d_bias.assign(model.n_classes, 0.0);

  for (const std::size_t sample : batch) {
    const auto x = features.row(sample);
    const std::vector<double> p = forward(model, x);
    for (std::size_t j = 0; j < model.n_classes; ++j) {
      const double g =
          class_weights[j] *
          (p[j] - static_cast<double>(labels(sample, j)));
      grads.d_bias[j] += g;
      double* row = grads.d_weights.data() + j * model.dim;
      for (std::size_t t = 0; t < model.dim; ++t) row[t] += g * x[t];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& v : grads.d_weights) v *= inv;
  for (double& v : grads.d_bias) v *= inv;
  return grads;
}

TrainResult train(const LabelMatrix& labels, const FeatureMatrix& features,
                  const TrainConfig& config) {
  if (labels.n_samples() != features.n_samples()) {
    throw Error(ErrorCode::shape_mismatch,
                "label rows do not match feature rows");
  }
  if (config.batch_size < 1) {
    throw Error(ErrorCode::invalid_config, "batch_size must be positive");
  }
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw Error(ErrorCode::invalid_config, "learning_rate must be positive");
  }
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw Error(ErrorCode::invalid_config, "momentum must lie in [0, 1)");
  }

  const std::size_t k = labels.n_classes();
  const std::size_t d = features.dim();
  std::vector<double> class_weights =
      config.class_weights.value_or(std::vector<double>(k, 1.0));
  check_class_weights(class_weights, k);

  Xoshiro256pp rng(config.seed);
  TrainResult result;
  result.model.n_classes = k;
  result.model.dim = d;
  result.model.weights.resize(k * d);
  result.model.bias.resize(k);
  for (double& w : result.model.weights) w = rng.uniform(-0.01, 0.01);
  for (double& b : result.model.bias) b = rng.uniform(-0.01, 0.01);

  std::vector<double> velocity_w(k * d, 0.0);
  std::vector<double> velocity_b(k, 0.0);
  std::vector<std::size_t> permutation(labels.n_samples());
  std::iota(permutation.begin(), permutation.end(), 0);
  std::size_t cursor = permutation.size();  // forces a shuffle first

  std::vector<std::uint8_t> target_row(k);
  result.loss_trace.reserve(config.iterations);
  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    if (cursor >= permutation.size()) {
      rng.shuffle(permutation);
      cursor = 0;
    }
    const std::size_t take =
        std::min(config.batch_size, permutation.size() - cursor);
    const std::span<const std::size_t> batch(permutation.data() + cursor,
                                             take);
    cursor += take;

    // Batch loss from the same forward pass structure as the gradient.
    double batch_loss = 0.0;
    for (const std::size_t sample : batch) {
      const std::vector<double> p = forward(result.model,
                                            features.row(sample));
      for (std::size_t j = 0; j < k; ++j) {
        target_row[j] = static_cast<std::uint8_t>(labels(sample, j));
      }
      batch_loss += weighted_bce(p, target_row, class_weights);
    }
    batch_loss /= static_cast<double>(batch.size());
    result.loss_trace.push_back(batch_loss);

    const Gradients grads =
        gradient(result.model, features, labels, batch, class_weights);
    for (std::size_t i = 0; i < velocity_w.size(); ++i) {
      velocity_w[i] = config.momentum * velocity_w[i] + grads.d_weights[i];
      result.model.weights[i] -= config.learning_rate * velocity_w[i];
    }
    for (std::size_t i = 0; i < velocity_b.size(); ++i) {
      velocity_b[i] = config.momentum * velocity_b[i] + grads.d_bias[i];
      result.model.bias[i] -= config.learning_rate * velocity_b[i];
    }
  }
  return result;
}

FeatureMatrix predict_all(const LinearModel& model,
                          const FeatureMatrix& features) {
  std::vector<double> out;
  out.reserve(features.n_samples() * model.n_classes);
  for (std::size_t s = 0; s < features.n_samples(); ++s) {
    const std::vector<double> p = forward(model, features.row(s));
    out.insert(out.end(), p.begin(), p.end());
  }
  return FeatureMatrix(features.n_samples(), model.n_classes, std::move(out));
}

namespace {

constexpr char kModelMagic[5] = {'D', 'W', 'L', 'M', '1'};

void put_u32_le(std::string& out, std::uint32_t value) {
  out.push_back(static_cast<char>(value & 0xFF));
  out.push_back(static_cast<char>((value >> 8) & 0xFF));
  out.push_back(static_cast<char>((value >> 16) & 0xFF));
  out.push_back(static_cast<char>((value >> 24) & 0xFF));
}

void put_f64_le(std::string& out, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(bits));
  for (int shift = 0; shift < 64; shift += 8) {
    out.push_back(static_cast<char>((bits >> shift) & 0xFF));
  }
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double value = 0.0;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

}  // namespace

void save_model(const std::string& path, const LinearModel& model) {
  for (const double v : model.weights) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value, "model weights not finite");
    }
  }
  for (const double v : model.bias) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value, "model biases not finite");
    }
  }
  std::string bytes;
  bytes.reserve(13 + 8 * (model.weights.size() + model.bias.size()));
  bytes.append(kModelMagic, sizeof(kModelMagic));
  put_u32_le(bytes, static_cast<std::uint32_t>(model.n_classes));
  put_u32_le(bytes, static_cast<std::uint32_t>(model.dim));
  for (const double v : model.weights) put_f64_le(bytes, v);
  for (const double v : model.bias) put_f64_le(bytes, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot open model file for writing: " + path);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::io_error, "failed writing model file: " + path);
  }
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open model file: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kModelMagic) ||
      std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0) {
    throw Error(ErrorCode::bad_magic, "not a DWLM1 model file: " + path);
  }
  if (bytes.size() < 13) {
    throw Error(ErrorCode::truncated_file, "model header truncated: " + path);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t k = get_u32_le(p + 5);
  const std::uint32_t d = get_u32_le(p + 9);
  const std::size_t expected =
      13 + 8 * (static_cast<std::size_t>(k) * d + k);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::truncated_file,
                "model file has " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(expected));
  }

  LinearModel model;
  model.n_classes = k;
  model.dim = d;
  model.weights.resize(static_cast<std::size_t>(k) * d);
  model.bias.resize(k);
  std::size_t offset = 13;
  for (double& v : model.weights) {
    v = get_f64_le(p + offset);
    offset += 8;
  }
  for (double& v : model.bias) {
    v = get_f64_le(p + offset);
    offset += 8;
  }
  for (const double v : model.weights) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value,
                  "model file contains non-finite weights: " + path);
    }
  }
  for (const double v : model.bias) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value,
                  "model file contains non-finite biases: " + path);
    }
  }
  return model;
}

}  // namespace classdiff
