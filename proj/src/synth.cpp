#include "classdiff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "classdiff/error.hpp"
#include "classdiff/rng.hpp"

namespace classdiff {

void SynthConfig::validate() const {
  if (n_classes < 1 || n_samples < 1 || feature_dim < 1) {
    throw Error(ErrorCode::invalid_config,
                "n_classes, n_samples and feature_dim must be positive");
  }
  if (n_samples < n_classes) {
    throw Error(ErrorCode::invalid_config,
                "need at least as many samples as classes");
  }
  if (!(freq_exponent >= 0.0) || !std::isfinite(freq_exponent)) {
    throw Error(ErrorCode::invalid_config, "freq_exponent must be >= 0");
  }
  if (spread.size() != n_classes) {
    throw Error(ErrorCode::invalid_config,
                "spread must list one value per class");
  }
  for (const double s : spread) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::invalid_config,
                  "spread values must be finite and >= 0");
    }
  }
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "label_noise must lie in [0, 1]");
  }
  std::vector<bool> covered(n_classes, false);
  for (const auto& group : cooc_groups) {
    if (!(group.p >= 0.0 && group.p <= 1.0)) {
      throw Error(ErrorCode::invalid_config,
                  "group probability must lie in [0, 1]");
    }
    if (group.members.empty()) {
      throw Error(ErrorCode::invalid_config, "empty co-occurrence group");
    }
    for (const std::size_t member : group.members) {
      if (member >= n_classes) {
        throw Error(ErrorCode::invalid_config,
                    "group member index out of range");
      }
      if (covered[member]) {
        throw Error(ErrorCode::invalid_config,
                    "class " + std::to_string(member) +
                        " appears in more than one group");
      }
      covered[member] = true;
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (!covered[c]) {
      throw Error(ErrorCode::invalid_config,
                  "class " + std::to_string(c) + " missing from the group "
                  "partition");
    }
  }
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const std::size_t k = config.n_classes;
  const std::size_t n = config.n_samples;
  const std::size_t d = config.feature_dim;

  SplitMix64 master(config.seed);
  Xoshiro256pp centroid_rng(master.next());
  Xoshiro256pp label_rng(master.next());
  Xoshiro256pp feature_rng(master.next());

  // Seed-derived unit vectors; at these sizes random directions are close to
  // quasi-uniform on the sphere.
  std::vector<double> centroids(k * d);
  for (std::size_t c = 0; c < k; ++c) {
    double norm = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const double v = centroid_rng.normal();
      centroids[c * d + t] = v;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      std::fill_n(centroids.begin() + static_cast<long>(c * d), d, 0.0);
      centroids[c * d + c % d] = 1.0;
    } else {
      for (std::size_t t = 0; t < d; ++t) centroids[c * d + t] /= norm;
    }
  }

  // Rank-power-law prior over classes (class 0 is the most frequent).
  std::vector<double> cumulative(k);
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    total += std::pow(static_cast<double>(c + 1), -config.freq_exponent);
    cumulative[c] = total;
  }

  std::vector<std::size_t> group_of(k);
  for (std::size_t g = 0; g < config.cooc_groups.size(); ++g) {
    for (const std::size_t member : config.cooc_groups[g].members) {
      group_of[member] = g;
    }
  }

  std::vector<std::uint8_t> active(n * k, 0);  // pre-noise activation sets
  std::vector<std::uint8_t> labels(n * k, 0);
  std::vector<std::size_t> primary(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = label_rng.uniform01() * total;
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t drawn = std::min(
        static_cast<std::size_t>(it - cumulative.begin()), k - 1);
    primary[s] = drawn;
    active[s * k + drawn] = 1;

    const CoocGroup& group = config.cooc_groups[group_of[drawn]];
    for (const std::size_t member : group.members) {
      if (member == drawn) continue;
      if (label_rng.uniform01() < group.p) active[s * k + member] = 1;
    }

    for (std::size_t c = 0; c < k; ++c) {
      labels[s * k + c] = active[s * k + c];
      // Flip uniforms are always drawn so the stream layout does not depend
      // on the label_noise value.
      if (label_rng.uniform01() < config.label_noise) {
        labels[s * k + c] ^= 1;
      }
    }
  }

  std::vector<double> features(n * d);
  std::vector<double> noise(d);
  for (std::size_t s = 0; s < n; ++s) {
    const double scale = config.spread[primary[s]];
    for (std::size_t t = 0; t < d; ++t) {
      noise[t] = feature_rng.normal() * scale;
    }
    double* row = features.data() + s * d;
    for (std::size_t t = 0; t < d; ++t) row[t] = noise[t];
    for (std::size_t c = 0; c < k; ++c) {
      if (!active[s * k + c]) continue;
      const double* centroid = centroids.data() + c * d;
      for (std::size_t t = 0; t < d; ++t) row[t] += centroid[t];
    }
    double norm = 0.0;
    for (std::size_t t = 0; t < d; ++t) norm += row[t] * row[t];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      const double* centroid = centroids.data() + primary[s] * d;
      for (std::size_t t = 0; t < d; ++t) row[t] = centroid[t];
    } else {
      for (std::size_t t = 0; t < d; ++t) row[t] /= norm;
    }
  }

  // Guarantee every class at least one positive: class i claims sample i
  // (valid because n_samples >= n_classes). Labels only; features stay.
  for (std::size_t c = 0; c < k; ++c) {
    bool any = false;
    for (std::size_t s = 0; s < n && !any; ++s) {
      any = labels[s * k + c] != 0;
    }
    if (!any) labels[c * k + c] = 1;
  }

  return SynthDataset{
      LabelMatrix(n, k, std::move(labels), make_class_names(k)),
      FeatureMatrix(n, d, std::move(features)),
  };
}

}  // namespace classdiff
