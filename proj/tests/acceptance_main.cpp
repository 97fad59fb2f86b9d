// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "classdiff/core.hpp"
#include "classdiff/error.hpp"
#include "classdiff/factors.hpp"
#include "classdiff/io.hpp"
#include "classdiff/lexicon.hpp"
#include "classdiff/metrics.hpp"
#include "classdiff/predictor.hpp"
#include "classdiff/rng.hpp"
#include "classdiff/synth.hpp"
#include "classdiff/trainer.hpp"

namespace fs = std::filesystem;
using namespace classdiff;

namespace {

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s]: %s (%s)\n", id, label,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// ---------------------------------------------------------------------------
// criterion 1: exact oracle equivalence
// ---------------------------------------------------------------------------

// Oracles are written from the definitions, independent of the library paths.

std::vector<double> oracle_frequency(const std::vector<std::size_t>& counts) {
  std::vector<double> logs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    logs[i] = std::log(static_cast<double>(counts[i]));
  }
  double max_log = 0.0;
  for (const double v : logs) max_log = std::max(max_log, v);
  std::vector<double> out(counts.size(), 0.0);
  if (max_log > 0.0) {
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = logs[i] / max_log;
  }
  return out;
}

std::vector<std::uint64_t> oracle_cooc_matrix(const LabelMatrix& y) {
  const std::size_t k = y.n_classes();
  std::vector<std::uint64_t> c(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      for (std::size_t s = 0; s < y.n_samples(); ++s) {
        if (y(s, i) && y(s, j)) ++c[i * k + j];
      }
    }
  }
  return c;
}

std::vector<double> oracle_cooc_factor(const LabelMatrix& y) {
  const auto c = oracle_cooc_matrix(y);
  const std::size_t k = y.n_classes();
  std::vector<double> per(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uint64_t row_sum = 0;
    for (std::size_t j = 0; j < k; ++j) row_sum += c[i * k + j];
    std::size_t count = 0;
    for (std::size_t s = 0; s < y.n_samples(); ++s) {
      count += y(s, i) ? 1 : 0;
    }
    per[i] = static_cast<double>(row_sum) / static_cast<double>(count);
  }
  double max_value = 0.0;
  for (const double v : per) max_value = std::max(max_value, v);
  std::vector<double> out(k, 0.0);
  if (max_value > 0.0) {
    for (std::size_t i = 0; i < k; ++i) out[i] = per[i] / max_value;
  }
  return out;
}

double oracle_average_precision(const std::vector<double>& scores,
                                const std::vector<std::uint8_t>& labels) {
  const std::size_t n = scores.size();
  std::vector<bool> used(n, false);
  std::vector<std::size_t> ranking;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best == n || scores[i] > scores[best]) best = i;
    }
    used[best] = true;
    ranking.push_back(best);
  }
  std::size_t total = 0;
  for (const auto l : labels) total += l ? 1 : 0;
  double sum = 0.0;
  std::size_t cumulative = 0;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    if (labels[ranking[rank - 1]]) {
      ++cumulative;
      sum += static_cast<double>(cumulative) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(total);
}

double oracle_roc_auc(const std::vector<double>& scores,
                      const std::vector<std::uint8_t>& labels) {
  double wins = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i]) {
      ++positives;
    } else {
      ++negatives;
    }
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(positives) *
                 static_cast<double>(negatives));
}

LabelMatrix random_labels(Xoshiro256pp& rng, std::size_t n, std::size_t k,
                          double density, bool ensure_positives) {
  std::vector<std::uint8_t> data(n * k, 0);
  for (auto& v : data) v = rng.uniform01() < density ? 1 : 0;
  if (ensure_positives) {
    for (std::size_t c = 0; c < k; ++c) data[(c % n) * k + c] = 1;
  }
  return LabelMatrix(n, k, std::move(data), make_class_names(k));
}

FeatureMatrix random_features(Xoshiro256pp& rng, std::size_t n,
                              std::size_t d) {
  std::vector<double> data(n * d);
  for (auto& v : data) v = rng.normal();
  for (std::size_t s = 0; s < n; ++s) {
    double norm = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      norm += data[s * d + t] * data[s * d + t];
    }
    if (norm < 1e-9) data[s * d] = 1.0;
  }
  return FeatureMatrix(n, d, std::move(data));
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256pp rng(1001);
  std::size_t mismatches = 0;
  std::size_t instances = 0;

  for (int trial = 0; trial < 220; ++trial) {
    const std::size_t k = 1 + rng.bounded(12);
    std::vector<std::size_t> counts(k);
    for (auto& c : counts) c = 1 + rng.bounded(200);
    if (compute_frequency({counts}).values != oracle_frequency(counts)) {
      ++mismatches;
    }
    ++instances;
  }

  for (int trial = 0; trial < 220; ++trial) {
    const std::size_t n = 1 + rng.bounded(200);
    const std::size_t k = 1 + rng.bounded(12);
    const LabelMatrix y = random_labels(rng, n, k, 0.3, true);
    if (cooccurrence_matrix(y).data() != oracle_cooc_matrix(y)) ++mismatches;
    if (compute_cooccurrence(y).values != oracle_cooc_factor(y)) ++mismatches;
    instances += 2;
  }

  std::size_t rank_checked = 0;
  while (rank_checked < 220) {
    const std::size_t n = 2 + rng.bounded(199);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (auto& s : scores) {
      s = static_cast<double>(rng.bounded(10)) / 9.0;  // frequent ties
    }
    std::size_t positives = 0;
    for (auto& l : labels) {
      l = rng.uniform01() < 0.4 ? 1 : 0;
      positives += l;
    }
    if (positives == 0 || positives == n) continue;
    if (average_precision(scores, labels) !=
        oracle_average_precision(scores, labels)) {
      ++mismatches;
    }
    if (roc_auc(scores, labels) != oracle_roc_auc(scores, labels)) {
      ++mismatches;
    }
    ++rank_checked;
    instances += 2;
  }

  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%zu oracle comparisons, %zu mismatches, %.2fs", instances,
                mismatches, elapsed);
  report(1, "oracle equivalence", mismatches == 0 && elapsed < 10.0, detail);
}

// ---------------------------------------------------------------------------
// criterion 2: gradient correctness
// ---------------------------------------------------------------------------

void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256pp rng(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + rng.bounded(5);
    const std::size_t d = 1 + rng.bounded(8);
    const std::size_t n = 1 + rng.bounded(5);
    LinearModel model;
    model.n_classes = k;
    model.dim = d;
    model.weights.resize(k * d);
    model.bias.resize(k);
    for (auto& w : model.weights) w = rng.uniform(-1.0, 1.0);
    for (auto& b : model.bias) b = rng.uniform(-1.0, 1.0);
    const FeatureMatrix x = random_features(rng, n, d);
    const LabelMatrix y = random_labels(rng, n, k, 0.5, false);
    std::vector<double> weights(k);
    for (auto& w : weights) w = rng.uniform(0.2, 3.0);  // non-uniform
    std::vector<std::size_t> batch(n);
    std::iota(batch.begin(), batch.end(), 0);

    const auto loss = [&]() {
      double total = 0.0;
      std::vector<std::uint8_t> targets(k);
      for (const std::size_t s : batch) {
        const std::vector<double> p = forward(model, x.row(s));
        for (std::size_t j = 0; j < k; ++j) {
          targets[j] = static_cast<std::uint8_t>(y(s, j));
        }
        total += weighted_bce(p, targets, weights);
      }
      return total / static_cast<double>(batch.size());
    };

    const Gradients g = gradient(model, x, y, batch, weights);
    const double h = 1e-5;
    const auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = loss();
      param = saved - h;
      const double down = loss();
      param = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(analytic - fd) /
                         std::max({1.0, std::abs(analytic), std::abs(fd)});
      worst = std::max(worst, rel);
    };
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      check(model.weights[i], g.d_weights[i]);
    }
    for (std::size_t j = 0; j < model.bias.size(); ++j) {
      check(model.bias[j], g.d_bias[j]);
    }
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "50 models, worst relative error %.3g, %.2fs", worst, elapsed);
  report(2, "gradient vs finite differences", worst < 1e-5 && elapsed < 5.0,
         detail);
}

// ---------------------------------------------------------------------------
// criterion 3: factor ranges, weight normalization, invariances
// ---------------------------------------------------------------------------

void criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256pp rng(3003);
  ConcretenessLexicon lexicon;
  lexicon.insert("walk", 4.0);
  lexicon.insert("run", 4.5);
  lexicon.insert("idea", 1.5);
  std::size_t violations = 0;
  std::size_t cases = 0;

  const auto in_unit = [&](const std::vector<double>& values) {
    for (const double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) ++violations;
    }
  };

  for (int trial = 0; trial < 1000; ++trial) {
    ++cases;
    const std::size_t n = 4 + rng.bounded(40);
    const std::size_t k = 1 + rng.bounded(10);
    const std::size_t d = 2 + rng.bounded(8);
    const LabelMatrix y = random_labels(rng, n, k, 0.3, true);
    const FeatureMatrix x = random_features(rng, n, d);

    const std::vector<double> freq =
        compute_frequency(class_counts(y)).values;
    const std::vector<double> visvar = compute_visual_variation(y, x).values;
    const std::vector<double> cooc = compute_cooccurrence(y).values;
    const std::vector<double> abstr =
        compute_semantic_abstraction(y.class_names(), lexicon).values;
    in_unit(freq);
    in_unit(visvar);
    in_unit(cooc);
    in_unit(abstr);

    // log-base invariance within 1e-12
    {
      std::vector<double> log10s(k);
      double max10 = 0.0;
      const ClassCounts counts = class_counts(y);
      for (std::size_t i = 0; i < k; ++i) {
        log10s[i] = std::log10(static_cast<double>(counts[i]));
        max10 = std::max(max10, log10s[i]);
      }
      for (std::size_t i = 0; i < k; ++i) {
        const double expected = max10 > 0.0 ? log10s[i] / max10 : 0.0;
        if (std::abs(freq[i] - expected) > 1e-12) ++violations;
      }
    }

    // cosine scale invariance
    {
      std::vector<double> scaled = x.data();
      const double factor = 0.5 + 10.0 * rng.uniform01();
      for (double& v : scaled) v *= factor;
      const std::vector<double> rescaled =
          compute_visual_variation(y, FeatureMatrix(n, d, scaled)).values;
      for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(visvar[i] - rescaled[i]) > 1e-9) ++violations;
      }
    }

    // weights: mean-one within 1e-12 and order reversal
    {
      std::vector<double> scores(k);
      for (auto& s : scores) {
        s = rng.uniform01() < 0.1 ? 0.0 : 4.0 * rng.uniform01();
      }
      const std::vector<double> w =
          loss_weights(scores, WeightNormalization::mean_one);
      double mean = 0.0;
      for (const double v : w) mean += v;
      mean /= static_cast<double>(k);
      if (std::abs(mean - 1.0) > 1e-12) ++violations;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (scores[i] < scores[j] && scores[i] >= kScoreFloor &&
              !(w[i] > w[j])) {
            ++violations;
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail), "%zu fuzz cases, %zu violations, %.2fs",
                cases, violations, elapsed);
  report(3, "factor ranges and weight normalization",
         violations == 0 && elapsed < 10.0, detail);
}

// ---------------------------------------------------------------------------
// criteria 4 and 6 share the pinned dataset and its baseline runs
// ---------------------------------------------------------------------------

struct SeedOutcome {
  double map_weighted = 0.0;
  double map_unweighted = 0.0;
  double iqr_weighted = 0.0;
  double iqr_unweighted = 0.0;
  double freq_ap_pearson = 0.0;
};

SynthConfig pinned_dataset_config(std::uint64_t seed) {
  SynthConfig config;
  config.n_classes = 20;
  config.n_samples = 2000;
  config.feature_dim = 16;
  config.freq_exponent = 1.5;
  config.spread.resize(20);
  for (std::size_t c = 0; c < 20; ++c) {
    // Heterogeneous but mild, decorrelated from the frequency rank: sample
    // starvation stays the dominant difficulty driver.
    config.spread[c] = 0.1 + 0.15 * static_cast<double>((c * 7) % 20) / 19.0;
  }
  for (std::size_t c = 0; c < 20; ++c) {
    if (c == 0 || c == 3 || c == 1 || c == 6) continue;
    config.cooc_groups.push_back({{c}, 0.0});
  }
  config.cooc_groups.push_back({{0, 3}, 0.8});
  config.cooc_groups.push_back({{1, 6}, 0.6});
  config.label_noise = 0.002;
  config.seed = seed;
  return config;
}

ConcretenessLexicon pinned_lexicon(const std::vector<std::string>& names) {
  // Concreteness tracks the frequency rank: head classes are concrete, tail
  // classes abstract, mirroring the hypothesis the factors encode. This
  // widens the reciprocal-weight ratio between easy and hard classes.
  ConcretenessLexicon lexicon;
  for (std::size_t c = 0; c < names.size(); ++c) {
    const double t =
        1.0 - static_cast<double>(c) / static_cast<double>(names.size() - 1);
    lexicon.insert(names[c], 0.3 + 4.7 * t);
  }
  return lexicon;
}

SeedOutcome run_pinned_seed(std::uint64_t seed) {
  const SynthConfig config = pinned_dataset_config(seed);
  const SynthDataset data = generate(config);
  const ConcretenessLexicon lexicon =
      pinned_lexicon(data.labels.class_names());

  const ProfileSet profiles =
      compute_profiles(data.labels, &data.features, &lexicon,
                       FactorSelection::all(), WeightNormalization::mean_one);
  std::vector<double> weights;
  std::vector<double> frequency;
  for (const auto& p : profiles.profiles) {
    weights.push_back(p.weight);
    frequency.push_back(*p.frequency);
  }

  TrainConfig train_config;
  train_config.learning_rate = 0.05;
  train_config.iterations = 5000;
  train_config.seed = seed;

  TrainConfig weighted_config = train_config;
  weighted_config.class_weights = weights;

  const TrainResult baseline = train(data.labels, data.features, train_config);
  const TrainResult weighted =
      train(data.labels, data.features, weighted_config);

  const EvaluationReport base_eval =
      evaluate(predict_all(baseline.model, data.features), data.labels);
  const EvaluationReport weighted_eval =
      evaluate(predict_all(weighted.model, data.features), data.labels);

  SeedOutcome outcome;
  outcome.map_unweighted = *base_eval.map;
  outcome.map_weighted = *weighted_eval.map;
  outcome.iqr_unweighted = base_eval.ap_box->iqr;
  outcome.iqr_weighted = weighted_eval.ap_box->iqr;

  std::vector<double> baseline_ap;
  for (const auto& c : base_eval.classes) baseline_ap.push_back(*c.ap);
  outcome.freq_ap_pearson = pearson(frequency, baseline_ap);
  return outcome;
}

void criteria_4_and_6() {
  const auto start = std::chrono::steady_clock::now();
  int map_wins = 0;
  int iqr_wins = 0;
  int positive_correlation = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SeedOutcome outcome = run_pinned_seed(seed);
    if (outcome.map_weighted > outcome.map_unweighted) ++map_wins;
    if (outcome.iqr_weighted < outcome.iqr_unweighted) ++iqr_wins;
    if (outcome.freq_ap_pearson > 0.0) ++positive_correlation;
  }
  const double elapsed = seconds_since(start);
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "MAP wins %d/10, IQR wins %d/10, %.1fs", map_wins, iqr_wins,
                elapsed);
  report(4, "difficulty weighting helps", map_wins >= 7 && iqr_wins >= 7 &&
         elapsed < 180.0, detail);

  char detail6[160];
  std::snprintf(detail6, sizeof(detail6),
                "pearson(freq, AP) > 0 in %d/10 seeds", positive_correlation);
  report(6, "frequency-performance correlation", positive_correlation >= 9,
         detail6);
}

// ---------------------------------------------------------------------------
// criterion 5: all four factors regress best
// ---------------------------------------------------------------------------

void criterion_5() {
  const auto start = std::chrono::steady_clock::now();
  int full_wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig config;
    config.n_classes = 40;
    config.n_samples = 4000;
    config.feature_dim = 16;
    config.freq_exponent = 1.2;
    config.spread.resize(40);
    for (std::size_t c = 0; c < 40; ++c) {
      config.spread[c] =
          0.1 + 0.6 * static_cast<double>((c * 13) % 40) / 39.0;
    }
    for (std::size_t c = 0; c < 40; ++c) {
      if (c == 3 || c == 9 || c == 21 || c == 30) continue;
      config.cooc_groups.push_back({{c}, 0.0});
    }
    config.cooc_groups.push_back({{3, 9}, 0.7});
    config.cooc_groups.push_back({{21, 30}, 0.5});
    config.label_noise = 0.01;
    config.seed = seed * 31 + 7;

    const SynthDataset data = generate(config);
    // Concreteness mirrors how concentrated a class looks: tight classes are
    // rated concrete, diffuse ones abstract.
    ConcretenessLexicon lexicon;
    double max_spread = 0.0;
    for (const double s : config.spread) max_spread = std::max(max_spread, s);
    for (std::size_t c = 0; c < config.n_classes; ++c) {
      const double rating =
          5.0 * (0.2 + 0.6 * (1.0 - config.spread[c] / max_spread));
      lexicon.insert(data.labels.class_names()[c], rating);
    }
    const ProfileSet profiles = compute_profiles(
        data.labels, &data.features, &lexicon, FactorSelection::all(),
        WeightNormalization::mean_one);

    TrainConfig train_config;
    train_config.learning_rate = 0.05;
    train_config.iterations = 5000;
    train_config.seed = config.seed;
    const TrainResult baseline =
        train(data.labels, data.features, train_config);
    const EvaluationReport eval =
        evaluate(predict_all(baseline.model, data.features), data.labels);

    std::vector<double> targets;
    std::vector<std::vector<double>> full_design;
    for (std::size_t c = 0; c < profiles.profiles.size(); ++c) {
      const DifficultyProfile& p = profiles.profiles[c];
      targets.push_back(*eval.classes[c].ap);
      full_design.push_back({*p.frequency, *p.visual_variation,
                             *p.semantic_abstraction, *p.cooccurrence});
    }

    const double full =
        loocv_predict(full_design, targets).pearson_pred_actual;
    bool beats_all = true;
    for (int f = 0; f < 4; ++f) {
      std::vector<std::vector<double>> single;
      for (const auto& row : full_design) single.push_back({row[f]});
      const double corr = loocv_predict(single, targets).pearson_pred_actual;
      if (full < corr) beats_all = false;
    }
    if (beats_all) ++full_wins;
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail), "all-factor wins %d/10, %.1fs",
                full_wins, elapsed);
  report(5, "all four factors regress best", full_wins >= 8 && elapsed < 180.0,
         detail);
}

// ---------------------------------------------------------------------------
// criterion 7: pipeline determinism through the CLI
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

bool run_step(const fs::path& dir, const std::string& cli,
              const std::string& args) {
  const std::string command = "cd '" + dir.string() + "' && '" + cli + "' " +
                              args + " >step_out.txt 2>step_err.txt";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

void criterion_7() {
  const char* cli = std::getenv("CLASSDIFF_CLI");
  if (cli == nullptr) {
    report(7, "pipeline determinism", false,
           "CLASSDIFF_CLI is not set; cannot drive the CLI");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "classdiff_acceptance_c7";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::ofstream(dir / "synth.json")
      << R"({"n_classes": 10, "n_samples": 400, "feature_dim": 12,
             "freq_exponent": 1.2, "spread": 0.25,
             "cooc_groups": [{"members": [1, 4], "group_p": 0.8}],
             "label_noise": 0.01, "seed": 2024})";
  std::ofstream(dir / "train.json")
      << R"({"iterations": 400, "seed": 17, "learning_rate": 0.05})";
  {
    std::ofstream lex(dir / "lexicon.tsv");
    for (int c = 0; c < 10; ++c) {
      lex << "c0" << c << "\t" << (1.0 + 0.35 * c) << "\n";
    }
  }

  const std::string steps[] = {
      "synth --config synth.json --out-annotations y.jsonl "
      "--out-features x.dfmx",
      "factors --annotations y.jsonl --features x.dfmx --lexicon lexicon.tsv "
      "--select freq,visvar,abstr,cooc --out factors.json --reproducible",
      "weights --factors factors.json --out weights.json --reproducible",
      "train --annotations y.jsonl --features x.dfmx --weights weights.json "
      "--config train.json --out model.dwlm --trace trace.csv "
      "--out-predictions preds.dfmx",
      "evaluate --predictions preds.dfmx --annotations y.jsonl "
      "--out eval.json --reproducible",
  };
  const std::string outputs[] = {"y.jsonl",      "x.dfmx",    "factors.json",
                                 "weights.json", "model.dwlm", "trace.csv",
                                 "preds.dfmx",   "eval.json"};

  bool ok = true;
  for (const auto& step : steps) ok = ok && run_step(dir, cli, step);
  std::vector<std::string> first;
  for (const auto& name : outputs) first.push_back(slurp(dir / name));
  for (const auto& step : steps) ok = ok && run_step(dir, cli, step);
  std::size_t identical = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (slurp(dir / outputs[i]) == first[i] && !first[i].empty()) ++identical;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "steps ok: %s, %zu/8 outputs byte-identical",
                ok ? "yes" : "no", identical);
  report(7, "pipeline determinism", ok && identical == 8, detail);
}

// ---------------------------------------------------------------------------
// criterion 8: binary format round-trips and error codes
// ---------------------------------------------------------------------------

void criterion_8() {
  const fs::path dir = fs::temp_directory_path() / "classdiff_acceptance_c8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Xoshiro256pp rng(8008);
  bool ok = true;
  std::string notes;

  // DFMX1 round trip on f32-exact data.
  std::vector<double> values(7 * 3);
  for (auto& v : values) {
    v = static_cast<double>(static_cast<float>(rng.normal()));
  }
  const FeatureMatrix matrix(7, 3, values);
  save_feature_matrix((dir / "m.dfmx").string(), matrix);
  const FeatureMatrix loaded = load_feature_matrix((dir / "m.dfmx").string());
  save_feature_matrix((dir / "m2.dfmx").string(), loaded);
  if (slurp(dir / "m.dfmx") != slurp(dir / "m2.dfmx")) {
    ok = false;
    notes += "DFMX1 rewrite differs; ";
  }

  // DWLM1 round trip.
  LinearModel model;
  model.n_classes = 4;
  model.dim = 6;
  model.weights.resize(24);
  model.bias.resize(4);
  for (auto& w : model.weights) w = rng.normal();
  for (auto& b : model.bias) b = rng.normal();
  save_model((dir / "m.dwlm").string(), model);
  const LinearModel reloaded = load_model((dir / "m.dwlm").string());
  save_model((dir / "m2.dwlm").string(), reloaded);
  if (slurp(dir / "m.dwlm") != slurp(dir / "m2.dwlm")) {
    ok = false;
    notes += "DWLM1 rewrite differs; ";
  }

  // Error codes for malformed files.
  const auto expect_code = [&](ErrorCode expected, const auto& fn,
                               const char* what) {
    try {
      fn();
      ok = false;
      notes += std::string(what) + " did not throw; ";
    } catch (const Error& e) {
      if (e.code() != expected) {
        ok = false;
        notes += std::string(what) + " wrong code; ";
      }
    }
  };
  {
    std::ofstream(dir / "bad_magic.dfmx") << "XXXXXXXXXXXXXXXXX";
    expect_code(ErrorCode::bad_magic, [&] {
      load_feature_matrix((dir / "bad_magic.dfmx").string());
    }, "DFMX1 bad magic");

    std::string truncated = slurp(dir / "m.dfmx");
    truncated.resize(truncated.size() - 2);
    std::ofstream(dir / "trunc.dfmx", std::ios::binary) << truncated;
    expect_code(ErrorCode::truncated_file, [&] {
      load_feature_matrix((dir / "trunc.dfmx").string());
    }, "DFMX1 truncation");

    std::string nan_file("DFMX1", 5);
    const unsigned char one[8] = {1, 0, 0, 0, 1, 0, 0, 0};
    nan_file.append(reinterpret_cast<const char*>(one), 8);
    const unsigned char nan_bits[4] = {0x00, 0x00, 0xC0, 0x7F};
    nan_file.append(reinterpret_cast<const char*>(nan_bits), 4);
    std::ofstream(dir / "nan.dfmx", std::ios::binary) << nan_file;
    expect_code(ErrorCode::non_finite_value, [&] {
      load_feature_matrix((dir / "nan.dfmx").string());
    }, "DFMX1 non-finite");

    std::ofstream(dir / "bad_magic.dwlm") << "YYYYYYYYYYYYYYY";
    expect_code(ErrorCode::bad_magic, [&] {
      load_model((dir / "bad_magic.dwlm").string());
    }, "DWLM1 bad magic");

    std::string short_model = slurp(dir / "m.dwlm");
    short_model.resize(short_model.size() - 1);
    std::ofstream(dir / "trunc.dwlm", std::ios::binary) << short_model;
    expect_code(ErrorCode::truncated_file, [&] {
      load_model((dir / "trunc.dwlm").string());
    }, "DWLM1 truncation");
  }

  report(8, "format round-trips and error codes", ok,
         ok ? "byte-identical rewrites, expected error codes" : notes);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_6();
  criterion_5();
  criterion_7();
  criterion_8();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
