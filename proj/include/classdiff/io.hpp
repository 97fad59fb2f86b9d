#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "classdiff/core.hpp"
#include "classdiff/error.hpp"
#include "classdiff/factors.hpp"
#include "classdiff/metrics.hpp"
#include "classdiff/synth.hpp"
#include "classdiff/trainer.hpp"

namespace classdiff {

inline constexpr const char* kToolName = "classdiff";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit over the file bytes, rendered as 16 hex digits. Used to
// record input identities in reports.
std::string fnv1a64_hex(const std::string& bytes);
std::string digest_file(const std::string& path);

// --- annotations (JSON lines) -----------------------------------------------
// One object per line: {"id": "...", "labels": ["...", ...]}. Column order
// comes from the optional class-list sidecar (one class per line), otherwise
// from first appearance.
LabelMatrix load_annotations(const std::string& path,
                             const std::optional<std::string>& class_list_path);
void save_annotations(const std::string& path, const LabelMatrix& labels);

// --- feature/prediction matrices (DFMX1) -------------------------------------
// Magic "DFMX1", u32 LE rows, u32 LE cols, rows*cols f32 LE row-major.
FeatureMatrix load_feature_matrix(const std::string& path);
void save_feature_matrix(const std::string& path, const FeatureMatrix& matrix);

// --- report files ------------------------------------------------------------

struct InputRef {
  std::string role;
  std::string path;
  std::string digest;
};

struct ReportClass {
  std::string name;
  std::optional<std::uint64_t> count;
  // Factor values keyed by factor name ("frequency", ...). Ordered map keeps
  // serialization deterministic.
  std::map<std::string, double> factors;
  std::optional<std::string> match_kind;
  std::optional<double> score;
  std::optional<double> weight;
  std::optional<double> ap;
  std::optional<double> auc;
};

// One schema covers factor, weight and evaluation reports; absent sections
// are simply omitted. Serialization is deterministic (sorted keys, lossless
// shortest round-trip doubles); `generated_at` is dropped in reproducible
// mode so repeat runs are byte-identical.
struct Report {
  std::string tool_name = kToolName;
  std::string tool_version = kToolVersion;
  std::optional<std::string> generated_at;
  std::vector<InputRef> inputs;
  std::vector<std::string> selection;
  std::optional<std::string> normalization;
  std::vector<ReportClass> classes;
  std::optional<double> map;
  std::optional<double> mean_auc;
  std::optional<BoxPlotStats> ap_box;
  std::optional<BoxPlotStats> auc_box;
  std::vector<Warning> warnings;
};

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
void write_report(const std::string& path, const Report& report);
Report read_report(const std::string& path);

std::string current_timestamp_utc();

// Profile/evaluation adapters used by the CLI.
Report make_factor_report(const ProfileSet& profiles);
Report make_evaluation_report(const EvaluationReport& evaluation);

// --- config files ------------------------------------------------------------
SynthConfig load_synth_config(const std::string& path);
TrainConfig load_train_config(const std::string& path);

// Generic JSON file loading with PARSE_ERROR diagnostics.
nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace classdiff
