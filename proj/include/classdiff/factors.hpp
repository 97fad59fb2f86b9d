#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "classdiff/core.hpp"
#include "classdiff/error.hpp"
#include "classdiff/lexicon.hpp"

namespace classdiff {

// Which of the four class-level difficulty factors participate in a score.
struct FactorSelection {
  bool frequency = false;
  bool visual_variation = false;
  bool semantic_abstraction = false;
  bool cooccurrence = false;

  static FactorSelection all() { return {true, true, true, true}; }
  bool any() const {
    return frequency || visual_variation || semantic_abstraction ||
           cooccurrence;
  }
  std::size_t count() const {
    return static_cast<std::size_t>(frequency) +
           static_cast<std::size_t>(visual_variation) +
           static_cast<std::size_t>(semantic_abstraction) +
           static_cast<std::size_t>(cooccurrence);
  }
};

enum class WeightNormalization { none, mean_one };

// A per-class factor vector in [0,1]^K. Degenerate normalizers (all raw
// values zero) yield an all-zero vector plus a DEGENERATE_MAX warning rather
// than an error, so pipelines keep running on pathological data.
struct FactorVector {
  std::vector<double> values;
  std::vector<Warning> warnings;
};

struct AbstractionFactor {
  std::vector<double> values;
  std::vector<MatchKind> match_kinds;
};

// Freq_i = log(s_i) / max_j log(s_j). The log base cancels in the ratio;
// natural log is used internally. Requires every count >= 1.
FactorVector compute_frequency(const ClassCounts& counts);

// Per class: centroid of the positive samples' feature rows, then the maximum
// cosine distance (1 - cosine similarity) from the centroid to any positive
// row, normalized by the largest such distance across classes. Distances
// below 1e-12 are treated as exact zeros.
FactorVector compute_visual_variation(const LabelMatrix& labels,
                                      const FeatureMatrix& features);

// Concreteness rating of the resolved class keyword divided by 5.0.
AbstractionFactor compute_semantic_abstraction(
    const std::vector<std::string>& class_names,
    const ConcretenessLexicon& lexicon);

// C = Y^T Y with the diagonal (self co-occurrence) zeroed.
CooccurrenceMatrix cooccurrence_matrix(const LabelMatrix& labels);

// Cooc_i = (sum_j C_ij / s_i) / max_k (sum_j C_kj / s_k).
FactorVector compute_cooccurrence(const LabelMatrix& labels);

struct FactorBundle {
  std::optional<std::vector<double>> frequency;
  std::optional<std::vector<double>> visual_variation;
  std::optional<std::vector<double>> semantic_abstraction;
  std::optional<std::vector<double>> cooccurrence;
};

// score_i = sum of the selected factors for class i.
std::vector<double> combine_factors(const FactorBundle& factors,
                                    const FactorSelection& selection);

// Scores below this floor are clamped before taking reciprocals, so an
// all-zero difficulty score cannot produce an unbounded weight.
inline constexpr double kScoreFloor = 1e-3;

// weight_i = 1 / max(score_i, kScoreFloor); with mean_one the weights are
// rescaled to average exactly 1 so weighting leaves the effective learning
// rate unchanged. Ordering always reverses the score ordering.
std::vector<double> loss_weights(const std::vector<double>& scores,
                                 WeightNormalization norm);

enum class FactorKind { frequency, visual_variation, semantic_abstraction, cooccurrence };

std::string_view factor_name(FactorKind kind);

// Everything the report file records for one class.
struct DifficultyProfile {
  std::string name;
  std::size_t count = 0;
  std::optional<double> frequency;
  std::optional<double> visual_variation;
  std::optional<double> semantic_abstraction;
  std::optional<MatchKind> match_kind;
  std::optional<double> cooccurrence;
  double score = 0.0;
  double weight = 1.0;
};

struct ProfileSet {
  std::vector<DifficultyProfile> profiles;
  FactorSelection selection;
  WeightNormalization normalization = WeightNormalization::mean_one;
  std::vector<Warning> warnings;
};

// Convenience composition used by the CLI: counts, selected factors, combined
// scores and loss weights in one pass. `features` is required when
// visual_variation is selected, `lexicon` when semantic_abstraction is.
ProfileSet compute_profiles(const LabelMatrix& labels,
                            const FeatureMatrix* features,
                            const ConcretenessLexicon* lexicon,
                            const FactorSelection& selection,
                            WeightNormalization norm);

}  // namespace classdiff
