#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classdiff/core.hpp"

namespace classdiff {

// Classes co-activate only within their group: a sample whose primary class
// belongs to the group turns on each other member with probability p.
struct CoocGroup {
  std::vector<std::size_t> members;
  double p = 0.0;
};

struct SynthConfig {
  std::size_t n_classes = 0;
  std::size_t n_samples = 0;
  std::size_t feature_dim = 0;
  double freq_exponent = 0.0;        // class prior proportional to rank^-exponent
  std::vector<double> spread;        // per-class Gaussian noise scale, >= 0
  std::vector<CoocGroup> cooc_groups;  // partition of all classes
  double label_noise = 0.0;          // per-label flip probability
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidConfig
};

struct SynthDataset {
  LabelMatrix labels;
  FeatureMatrix features;
};

// Deterministic generator. Stream layout (fixed; part of the contract):
// splitmix64(seed) yields three sub-seeds for independent xoshiro256++
// streams (centroids, labels, features).
//   centroids: per class, feature_dim Box-Muller normals, L2-normalized.
//   labels: per sample, one uniform for the power-law primary draw, one
//     uniform per other member of the primary's group, then one uniform per
//     class for the noise flip (drawn even when label_noise is zero).
//   features: per sample, feature_dim normals scaled by the primary class's
//     spread, added to the sum of the pre-flip active centroids, normalized.
// Features reflect the pre-noise activation set; label flips and the
// every-class-positive injection pass (class i -> sample i) change labels
// only.
SynthDataset generate(const SynthConfig& config);

}  // namespace classdiff
