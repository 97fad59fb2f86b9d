#include "classdiff/io.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace classdiff {

using nlohmann::json;

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot open file for writing: " + path);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::io_error, "failed writing file: " + path);
  }
}

void put_u32_le(std::string& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((value >> shift) & 0xFF));
  }
}

void put_f32_le(std::string& out, float value) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, &value, sizeof(bits));
  put_u32_le(out, bits);
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = get_u32_le(p);
  float value = 0.0F;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

constexpr char kFeatureMagic[5] = {'D', 'F', 'M', 'X', '1'};

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

std::string digest_file(const std::string& path) {
  return fnv1a64_hex(read_file_bytes(path));
}

LabelMatrix load_annotations(
    const std::string& path,
    const std::optional<std::string>& class_list_path) {
  std::vector<std::string> class_order;
  std::map<std::string, std::size_t> class_index;
  const bool fixed_order = class_list_path.has_value();
  if (fixed_order) {
    std::ifstream in(*class_list_path);
    if (!in) {
      throw Error(ErrorCode::io_error,
                  "cannot open class list: " + *class_list_path);
    }
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      const std::string name = trim(line);
      if (name.empty()) continue;
      if (!class_index.emplace(name, class_order.size()).second) {
        throw Error(ErrorCode::parse_error,
                    "class list line " + std::to_string(line_number) +
                        ": duplicate class '" + name + "'");
      }
      class_order.push_back(name);
    }
    if (class_order.empty()) {
      throw Error(ErrorCode::parse_error,
                  "class list is empty: " + *class_list_path);
    }
  }

  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open annotations: " + path);
  }

  std::set<std::string> seen_ids;
  std::vector<std::vector<std::size_t>> sample_labels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error,
                  "annotations line " + std::to_string(line_number) + ": " +
                      e.what());
    }
    if (!entry.is_object() || !entry.contains("id") ||
        !entry["id"].is_string() || !entry.contains("labels") ||
        !entry["labels"].is_array()) {
      throw Error(ErrorCode::parse_error,
                  "annotations line " + std::to_string(line_number) +
                      ": expected {\"id\": string, \"labels\": [string...]}");
    }
    const std::string id = entry["id"].get<std::string>();
    if (!seen_ids.insert(id).second) {
      throw Error(ErrorCode::duplicate_id,
                  "annotations line " + std::to_string(line_number) +
                      ": duplicate id '" + id + "'");
    }
    std::vector<std::size_t> indices;
    for (const auto& label : entry["labels"]) {
      if (!label.is_string()) {
        throw Error(ErrorCode::parse_error,
                    "annotations line " + std::to_string(line_number) +
                        ": labels must be strings");
      }
      const std::string name = label.get<std::string>();
      auto it = class_index.find(name);
      if (it == class_index.end()) {
        if (fixed_order) {
          throw Error(ErrorCode::unknown_label,
                      "annotations line " + std::to_string(line_number) +
                          ": label '" + name + "' not in the class list");
        }
        it = class_index.emplace(name, class_order.size()).first;
        class_order.push_back(name);
      }
      indices.push_back(it->second);
    }
    sample_labels.push_back(std::move(indices));
  }
  if (sample_labels.empty()) {
    throw Error(ErrorCode::parse_error, "annotations file has no samples");
  }
  if (class_order.empty()) {
    throw Error(ErrorCode::parse_error,
                "annotations define no classes at all");
  }

  const std::size_t k = class_order.size();
  std::vector<std::uint8_t> data(sample_labels.size() * k, 0);
  for (std::size_t s = 0; s < sample_labels.size(); ++s) {
    for (const std::size_t c : sample_labels[s]) data[s * k + c] = 1;
  }
  return LabelMatrix(sample_labels.size(), k, std::move(data),
                     std::move(class_order));
}

void save_annotations(const std::string& path, const LabelMatrix& labels) {
  std::size_t width = 6;
  std::string out;
  for (std::size_t s = 0; s < labels.n_samples(); ++s) {
    json entry;
    std::string digits = std::to_string(s);
    entry["id"] =
        "s" + std::string(width > digits.size() ? width - digits.size() : 0,
                          '0') +
        digits;
    json names = json::array();
    for (std::size_t c = 0; c < labels.n_classes(); ++c) {
      if (labels(s, c)) names.push_back(labels.class_names()[c]);
    }
    entry["labels"] = std::move(names);
    out += entry.dump();
    out += '\n';
  }
  write_file_bytes(path, out);
}

FeatureMatrix load_feature_matrix(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < sizeof(kFeatureMagic) ||
      std::memcmp(bytes.data(), kFeatureMagic, sizeof(kFeatureMagic)) != 0) {
    throw Error(ErrorCode::bad_magic, "not a DFMX1 matrix file: " + path);
  }
  if (bytes.size() < 13) {
    throw Error(ErrorCode::truncated_file, "matrix header truncated: " + path);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t rows = get_u32_le(p + 5);
  const std::uint32_t cols = get_u32_le(p + 9);
  const std::size_t expected =
      13 + 4 * (static_cast<std::size_t>(rows) * cols);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::truncated_file,
                "matrix file has " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(expected));
  }
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  std::size_t offset = 13;
  for (double& v : data) {
    const float f = get_f32_le(p + offset);
    offset += 4;
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::non_finite_value,
                  "matrix file contains a non-finite value: " + path);
    }
    v = static_cast<double>(f);
  }
  return FeatureMatrix(rows, cols, std::move(data));
}

void save_feature_matrix(const std::string& path,
                         const FeatureMatrix& matrix) {
  std::string bytes;
  bytes.reserve(13 + 4 * matrix.data().size());
  bytes.append(kFeatureMagic, sizeof(kFeatureMagic));
  put_u32_le(bytes, static_cast<std::uint32_t>(matrix.n_samples()));
  put_u32_le(bytes, static_cast<std::uint32_t>(matrix.dim()));
  for (const double v : matrix.data()) {
    put_f32_le(bytes, static_cast<float>(v));
  }
  write_file_bytes(path, bytes);
}

namespace {

json boxplot_to_json(const BoxPlotStats& stats) {
  json j;
  j["min"] = stats.min;
  j["q1"] = stats.q1;
  j["median"] = stats.median;
  j["q3"] = stats.q3;
  j["max"] = stats.max;
  j["iqr"] = stats.iqr;
  j["lower_fence"] = stats.lower_fence;
  j["upper_fence"] = stats.upper_fence;
  j["outliers"] = stats.outliers;
  return j;
}

BoxPlotStats boxplot_from_json(const json& j) {
  BoxPlotStats stats;
  stats.min = j.at("min").get<double>();
  stats.q1 = j.at("q1").get<double>();
  stats.median = j.at("median").get<double>();
  stats.q3 = j.at("q3").get<double>();
  stats.max = j.at("max").get<double>();
  stats.iqr = j.at("iqr").get<double>();
  stats.lower_fence = j.at("lower_fence").get<double>();
  stats.upper_fence = j.at("upper_fence").get<double>();
  stats.outliers = j.at("outliers").get<std::vector<double>>();
  return stats;
}

}  // namespace

nlohmann::json report_to_json(const Report& report) {
  json j;
  j["tool"] = {{"name", report.tool_name}, {"version", report.tool_version}};
  if (report.generated_at) j["generated_at"] = *report.generated_at;
  json inputs = json::array();
  for (const auto& input : report.inputs) {
    inputs.push_back({{"role", input.role},
                      {"path", input.path},
                      {"digest", input.digest}});
  }
  j["inputs"] = std::move(inputs);
  if (!report.selection.empty()) j["selection"] = report.selection;
  if (report.normalization) j["normalization"] = *report.normalization;

  json classes = json::array();
  for (const auto& record : report.classes) {
    json c;
    c["name"] = record.name;
    if (record.count) c["count"] = *record.count;
    if (!record.factors.empty()) c["factors"] = record.factors;
    if (record.match_kind) c["match_kind"] = *record.match_kind;
    if (record.score) c["score"] = *record.score;
    if (record.weight) c["weight"] = *record.weight;
    if (record.ap) c["ap"] = *record.ap;
    if (record.auc) c["auc"] = *record.auc;
    classes.push_back(std::move(c));
  }
  j["classes"] = std::move(classes);

  json aggregates = json::object();
  if (report.map) aggregates["map"] = *report.map;
  if (report.mean_auc) aggregates["mean_auc"] = *report.mean_auc;
  if (!aggregates.empty()) j["aggregates"] = std::move(aggregates);
  if (report.ap_box) j["ap_box"] = boxplot_to_json(*report.ap_box);
  if (report.auc_box) j["auc_box"] = boxplot_to_json(*report.auc_box);

  json warnings = json::array();
  for (const auto& warning : report.warnings) {
    warnings.push_back({{"code", warning.code}, {"detail", warning.detail}});
  }
  j["warnings"] = std::move(warnings);
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  Report report;
  try {
    report.tool_name = j.at("tool").at("name").get<std::string>();
    report.tool_version = j.at("tool").at("version").get<std::string>();
    if (j.contains("generated_at")) {
      report.generated_at = j["generated_at"].get<std::string>();
    }
    for (const auto& input : j.at("inputs")) {
      report.inputs.push_back({input.at("role").get<std::string>(),
                               input.at("path").get<std::string>(),
                               input.at("digest").get<std::string>()});
    }
    if (j.contains("selection")) {
      report.selection = j["selection"].get<std::vector<std::string>>();
    }
    if (j.contains("normalization")) {
      report.normalization = j["normalization"].get<std::string>();
    }
    for (const auto& c : j.at("classes")) {
      ReportClass record;
      record.name = c.at("name").get<std::string>();
      if (c.contains("count")) {
        record.count = c["count"].get<std::uint64_t>();
      }
      if (c.contains("factors")) {
        record.factors = c["factors"].get<std::map<std::string, double>>();
      }
      if (c.contains("match_kind")) {
        record.match_kind = c["match_kind"].get<std::string>();
      }
      if (c.contains("score")) record.score = c["score"].get<double>();
      if (c.contains("weight")) record.weight = c["weight"].get<double>();
      if (c.contains("ap")) record.ap = c["ap"].get<double>();
      if (c.contains("auc")) record.auc = c["auc"].get<double>();
      report.classes.push_back(std::move(record));
    }
    if (j.contains("aggregates")) {
      const auto& aggregates = j["aggregates"];
      if (aggregates.contains("map")) {
        report.map = aggregates["map"].get<double>();
      }
      if (aggregates.contains("mean_auc")) {
        report.mean_auc = aggregates["mean_auc"].get<double>();
      }
    }
    if (j.contains("ap_box")) report.ap_box = boxplot_from_json(j["ap_box"]);
    if (j.contains("auc_box")) {
      report.auc_box = boxplot_from_json(j["auc_box"]);
    }
    for (const auto& warning : j.at("warnings")) {
      report.warnings.push_back({warning.at("code").get<std::string>(),
                                 warning.at("detail").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("malformed report: ") + e.what());
  }
  return report;
}

void write_report(const std::string& path, const Report& report) {
  write_file_bytes(path, report_to_json(report).dump(2) + "\n");
}

Report read_report(const std::string& path) {
  return report_from_json(load_json_file(path));
}

std::string current_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

Report make_factor_report(const ProfileSet& profiles) {
  Report report;
  if (profiles.selection.frequency) report.selection.emplace_back("frequency");
  if (profiles.selection.visual_variation) {
    report.selection.emplace_back("visual_variation");
  }
  if (profiles.selection.semantic_abstraction) {
    report.selection.emplace_back("semantic_abstraction");
  }
  if (profiles.selection.cooccurrence) {
    report.selection.emplace_back("cooccurrence");
  }
  report.normalization =
      profiles.normalization == WeightNormalization::mean_one ? "mean_one"
                                                              : "none";
  for (const auto& profile : profiles.profiles) {
    ReportClass record;
    record.name = profile.name;
    record.count = profile.count;
    if (profile.frequency) record.factors["frequency"] = *profile.frequency;
    if (profile.visual_variation) {
      record.factors["visual_variation"] = *profile.visual_variation;
    }
    if (profile.semantic_abstraction) {
      record.factors["semantic_abstraction"] = *profile.semantic_abstraction;
    }
    if (profile.match_kind) {
      record.match_kind = std::string(to_string(*profile.match_kind));
    }
    if (profile.cooccurrence) {
      record.factors["cooccurrence"] = *profile.cooccurrence;
    }
    record.score = profile.score;
    record.weight = profile.weight;
    report.classes.push_back(std::move(record));
  }
  report.warnings = profiles.warnings;
  return report;
}

Report make_evaluation_report(const EvaluationReport& evaluation) {
  Report report;
  for (const auto& entry : evaluation.classes) {
    ReportClass record;
    record.name = entry.name;
    record.count = entry.positives;
    record.ap = entry.ap;
    record.auc = entry.auc;
    report.classes.push_back(std::move(record));
  }
  report.map = evaluation.map;
  report.mean_auc = evaluation.mean_auc;
  report.ap_box = evaluation.ap_box;
  report.auc_box = evaluation.auc_box;
  report.warnings = evaluation.warnings;
  return report;
}

nlohmann::json load_json_file(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  try {
    return json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error,
                path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_file_bytes(path, j.dump(2) + "\n");
}

SynthConfig load_synth_config(const std::string& path) {
  const json j = load_json_file(path);
  SynthConfig config;
  try {
    config.n_classes = j.at("n_classes").get<std::size_t>();
    config.n_samples = j.at("n_samples").get<std::size_t>();
    config.feature_dim = j.at("feature_dim").get<std::size_t>();
    config.freq_exponent = j.value("freq_exponent", 0.0);
    config.label_noise = j.value("label_noise", 0.0);
    config.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("spread")) {
      const auto& spread = j["spread"];
      if (spread.is_number()) {
        config.spread.assign(config.n_classes, spread.get<double>());
      } else {
        config.spread = spread.get<std::vector<double>>();
      }
    } else {
      config.spread.assign(config.n_classes, 1.0);
    }

    if (j.contains("cooc_groups")) {
      for (const auto& g : j["cooc_groups"]) {
        CoocGroup group;
        group.members = g.at("members").get<std::vector<std::size_t>>();
        group.p = g.value("group_p", 0.0);
        config.cooc_groups.push_back(std::move(group));
      }
      // Classes not named in any group become singletons.
      std::vector<bool> covered(config.n_classes, false);
      for (const auto& group : config.cooc_groups) {
        for (const std::size_t member : group.members) {
          if (member < covered.size()) covered[member] = true;
        }
      }
      for (std::size_t c = 0; c < config.n_classes; ++c) {
        if (!covered[c]) config.cooc_groups.push_back({{c}, 0.0});
      }
    } else {
      for (std::size_t c = 0; c < config.n_classes; ++c) {
        config.cooc_groups.push_back({{c}, 0.0});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                path + ": " + e.what());
  }
  config.validate();
  return config;
}

TrainConfig load_train_config(const std::string& path) {
  const json j = load_json_file(path);
  TrainConfig config;
  try {
    config.learning_rate = j.value("learning_rate", 0.001);
    config.momentum = j.value("momentum", 0.9);
    config.batch_size = j.value("batch_size", std::size_t{28});
    config.iterations = j.at("iterations").get<std::size_t>();
    config.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                path + ": " + e.what());
  }
  if (config.iterations < 1) {
    throw Error(ErrorCode::invalid_config,
                path + ": iterations must be positive");
  }
  return config;
}

}  // namespace classdiff
