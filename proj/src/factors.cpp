#include "classdiff/factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace classdiff {

namespace {

constexpr double kZeroNormTolerance = 1e-12;
constexpr double kZeroDistanceSnap = 1e-12;

Warning degenerate_max_warning(std::string factor) {
  return Warning{"DEGENERATE_MAX",
                 factor + ": all raw values are zero; factor set to zeros"};
}

// Shared normalize-by-max step. `raw` entries must be >= 0.
FactorVector normalize_by_max(std::vector<double> raw, const char* factor) {
  double max_value = 0.0;
  for (const double v : raw) max_value = std::max(max_value, v);
  if (max_value <= 0.0) {
    std::fill(raw.begin(), raw.end(), 0.0);
    return {std::move(raw), {degenerate_max_warning(factor)}};
  }
  for (double& v : raw) v /= max_value;
  return {std::move(raw), {}};
}

}  // namespace

std::string_view factor_name(FactorKind kind) {
  switch (kind) {
    case FactorKind::frequency: return "frequency";
    case FactorKind::visual_variation: return "visual_variation";
    case FactorKind::semantic_abstraction: return "semantic_abstraction";
    case FactorKind::cooccurrence: return "cooccurrence";
  }
  return "unknown";
}

FactorVector compute_frequency(const ClassCounts& counts) {
  std::vector<double> logs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) {
      throw Error(ErrorCode::zero_count,
                  "class " + std::to_string(i) +
                      " has zero occurrences; frequency factor undefined");
    }
    logs[i] = std::log(static_cast<double>(counts[i]));
  }
  return normalize_by_max(std::move(logs), "frequency");
}

FactorVector compute_visual_variation(const LabelMatrix& labels,
                                      const FeatureMatrix& features) {
  if (features.n_samples() != labels.n_samples()) {
    throw Error(ErrorCode::shape_mismatch,
                "feature rows do not match label rows");
  }
  const std::size_t k = labels.n_classes();
  const std::size_t d = features.dim();

  std::vector<double> raw(k, 0.0);
  std::vector<double> centroid(d);
  for (std::size_t c = 0; c < k; ++c) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    std::size_t positives = 0;
    for (std::size_t s = 0; s < labels.n_samples(); ++s) {
      if (!labels(s, c)) continue;
      ++positives;
      const auto row = features.row(s);
      for (std::size_t t = 0; t < d; ++t) centroid[t] += row[t];
    }
    if (positives == 0) {
      throw Error(ErrorCode::no_positives,
                  "class '" + labels.class_names()[c] +
                      "' has no positive samples; visual variation undefined");
    }
    for (double& v : centroid) v /= static_cast<double>(positives);

    double centroid_norm = 0.0;
    for (const double v : centroid) centroid_norm += v * v;
    centroid_norm = std::sqrt(centroid_norm);
    if (centroid_norm < kZeroNormTolerance) {
      throw Error(ErrorCode::zero_vector,
                  "class '" + labels.class_names()[c] +
                      "' centroid has zero norm; cosine distance undefined");
    }

    double max_distance = 0.0;
    for (std::size_t s = 0; s < labels.n_samples(); ++s) {
      if (!labels(s, c)) continue;
      const auto row = features.row(s);
      double dot = 0.0;
      double row_norm = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        dot += row[t] * centroid[t];
        row_norm += row[t] * row[t];
      }
      row_norm = std::sqrt(row_norm);
      if (row_norm < kZeroNormTolerance) {
        throw Error(ErrorCode::zero_vector,
                    "sample " + std::to_string(s) +
                        " has a zero-norm feature vector");
      }
      const double similarity =
          std::min(1.0, dot / (row_norm * centroid_norm));
      const double distance = std::max(0.0, 1.0 - similarity);
      max_distance = std::max(max_distance, distance);
    }
    raw[c] = max_distance < kZeroDistanceSnap ? 0.0 : max_distance;
  }
  return normalize_by_max(std::move(raw), "visual_variation");
}

AbstractionFactor compute_semantic_abstraction(
    const std::vector<std::string>& class_names,
    const ConcretenessLexicon& lexicon) {
  AbstractionFactor out;
  out.values.reserve(class_names.size());
  out.match_kinds.reserve(class_names.size());
  for (const auto& name : class_names) {
    const LookupResult hit = lexicon.lookup(name);
    out.values.push_back(hit.rating / 5.0);
    out.match_kinds.push_back(hit.kind);
  }
  return out;
}

CooccurrenceMatrix cooccurrence_matrix(const LabelMatrix& labels) {
  const std::size_t k = labels.n_classes();
  std::vector<std::uint64_t> data(k * k, 0);
  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < labels.n_samples(); ++s) {
    active.clear();
    for (std::size_t c = 0; c < k; ++c) {
      if (labels(s, c)) active.push_back(c);
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        ++data[active[a] * k + active[b]];
        ++data[active[b] * k + active[a]];
      }
    }
  }
  return CooccurrenceMatrix(k, std::move(data));
}

FactorVector compute_cooccurrence(const LabelMatrix& labels) {
  const CooccurrenceMatrix c = cooccurrence_matrix(labels);
  const ClassCounts s = class_counts(labels);
  std::vector<double> per_class(labels.n_classes());
  for (std::size_t i = 0; i < labels.n_classes(); ++i) {
    if (s[i] == 0) {
      throw Error(ErrorCode::zero_count,
                  "class " + std::to_string(i) +
                      " has zero occurrences; co-occurrence factor undefined");
    }
    per_class[i] =
        static_cast<double>(c.row_sum(i)) / static_cast<double>(s[i]);
  }
  return normalize_by_max(std::move(per_class), "cooccurrence");
}

std::vector<double> combine_factors(const FactorBundle& factors,
                                    const FactorSelection& selection) {
  if (!selection.any()) {
    throw Error(ErrorCode::missing_factor,
                "at least one factor must be selected for scoring");
  }
  const std::optional<std::vector<double>>* slots[4] = {
      &factors.frequency, &factors.visual_variation,
      &factors.semantic_abstraction, &factors.cooccurrence};
  const bool selected[4] = {selection.frequency, selection.visual_variation,
                            selection.semantic_abstraction,
                            selection.cooccurrence};
  const FactorKind kinds[4] = {
      FactorKind::frequency, FactorKind::visual_variation,
      FactorKind::semantic_abstraction, FactorKind::cooccurrence};

  std::size_t k = 0;
  for (int f = 0; f < 4; ++f) {
    if (!selected[f]) continue;
    if (!slots[f]->has_value()) {
      throw Error(ErrorCode::missing_factor,
                  std::string(factor_name(kinds[f])) +
                      " selected but not computed");
    }
    if (k == 0) {
      k = (*slots[f])->size();
    } else if ((*slots[f])->size() != k) {
      throw Error(ErrorCode::shape_mismatch,
                  "selected factor vectors have differing lengths");
    }
  }

  std::vector<double> scores(k, 0.0);
  for (int f = 0; f < 4; ++f) {
    if (!selected[f]) continue;
    const auto& values = **slots[f];
    for (std::size_t i = 0; i < k; ++i) scores[i] += values[i];
  }
  return scores;
}

std::vector<double> loss_weights(const std::vector<double>& scores,
                                 WeightNormalization norm) {
  std::vector<double> weights(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = 1.0 / std::max(scores[i], kScoreFloor);
    sum += weights[i];
  }
  if (norm == WeightNormalization::mean_one) {
    const double scale = static_cast<double>(scores.size()) / sum;
    for (double& w : weights) w *= scale;
  }
  return weights;
}

ProfileSet compute_profiles(const LabelMatrix& labels,
                            const FeatureMatrix* features,
                            const ConcretenessLexicon* lexicon,
                            const FactorSelection& selection,
                            WeightNormalization norm) {
  ProfileSet out;
  out.selection = selection;
  out.normalization = norm;

  const ClassCounts counts = class_counts(labels);
  FactorBundle bundle;

  if (selection.frequency) {
    FactorVector f = compute_frequency(counts);
    bundle.frequency = std::move(f.values);
    out.warnings.insert(out.warnings.end(), f.warnings.begin(),
                        f.warnings.end());
  }
  if (selection.visual_variation) {
    if (features == nullptr) {
      throw Error(ErrorCode::missing_factor,
                  "visual_variation selected but no features provided");
    }
    FactorVector f = compute_visual_variation(labels, *features);
    bundle.visual_variation = std::move(f.values);
    out.warnings.insert(out.warnings.end(), f.warnings.begin(),
                        f.warnings.end());
  }
  std::vector<MatchKind> match_kinds;
  if (selection.semantic_abstraction) {
    if (lexicon == nullptr) {
      throw Error(ErrorCode::missing_factor,
                  "semantic_abstraction selected but no lexicon provided");
    }
    AbstractionFactor f =
        compute_semantic_abstraction(labels.class_names(), *lexicon);
    bundle.semantic_abstraction = std::move(f.values);
    match_kinds = std::move(f.match_kinds);
  }
  if (selection.cooccurrence) {
    FactorVector f = compute_cooccurrence(labels);
    bundle.cooccurrence = std::move(f.values);
    out.warnings.insert(out.warnings.end(), f.warnings.begin(),
                        f.warnings.end());
  }

  const std::vector<double> scores = combine_factors(bundle, selection);
  const std::vector<double> weights = loss_weights(scores, norm);

  out.profiles.resize(labels.n_classes());
  for (std::size_t i = 0; i < labels.n_classes(); ++i) {
    DifficultyProfile& p = out.profiles[i];
    p.name = labels.class_names()[i];
    p.count = counts[i];
    if (bundle.frequency) p.frequency = (*bundle.frequency)[i];
    if (bundle.visual_variation) {
      p.visual_variation = (*bundle.visual_variation)[i];
    }
    if (bundle.semantic_abstraction) {
      p.semantic_abstraction = (*bundle.semantic_abstraction)[i];
      p.match_kind = match_kinds[i];
    }
    if (bundle.cooccurrence) p.cooccurrence = (*bundle.cooccurrence)[i];
    p.score = scores[i];
    p.weight = weights[i];
  }
  return out;
}

}  // namespace classdiff
