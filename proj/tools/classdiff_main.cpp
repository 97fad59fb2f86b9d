// classdiff: class-level difficulty factors, loss weights, evaluation and a
// reference trainer for multi-label datasets.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "classdiff/core.hpp"
#include "classdiff/error.hpp"
#include "classdiff/factors.hpp"
#include "classdiff/io.hpp"
#include "classdiff/lexicon.hpp"
#include "classdiff/metrics.hpp"
#include "classdiff/predictor.hpp"
#include "classdiff/synth.hpp"
#include "classdiff/trainer.hpp"

namespace {

using classdiff::Error;
using classdiff::ErrorCode;
using nlohmann::json;

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

classdiff::FactorSelection parse_selection(const std::string& select) {
  classdiff::FactorSelection selection;
  std::size_t begin = 0;
  while (begin <= select.size()) {
    const std::size_t comma = select.find(',', begin);
    const std::string token =
        select.substr(begin, comma == std::string::npos ? std::string::npos
                                                        : comma - begin);
    if (token == "freq") {
      selection.frequency = true;
    } else if (token == "visvar") {
      selection.visual_variation = true;
    } else if (token == "abstr") {
      selection.semantic_abstraction = true;
    } else if (token == "cooc") {
      selection.cooccurrence = true;
    } else {
      throw Error(ErrorCode::usage,
                  "unknown factor '" + token +
                      "' in --select (expected freq,visvar,abstr,cooc)");
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return selection;
}

classdiff::WeightNormalization parse_normalization(const std::string& name) {
  if (name == "none") return classdiff::WeightNormalization::none;
  if (name == "mean1") return classdiff::WeightNormalization::mean_one;
  throw Error(ErrorCode::usage,
              "unknown --normalize value '" + name + "' (none|mean1)");
}

void stamp(classdiff::Report& report, bool reproducible) {
  if (!reproducible) {
    report.generated_at = classdiff::current_timestamp_utc();
  }
}

struct FactorsArgs {
  std::string annotations;
  std::optional<std::string> class_list;
  std::optional<std::string> features;
  std::optional<std::string> lexicon;
  std::string select;
  std::string normalize = "mean1";
  std::string out;
  bool reproducible = false;
};

void run_factors(const FactorsArgs& args) {
  const classdiff::FactorSelection selection = parse_selection(args.select);
  if (selection.visual_variation && !args.features) {
    throw Error(ErrorCode::usage,
                "--select visvar requires --features");
  }
  if (selection.semantic_abstraction && !args.lexicon) {
    throw Error(ErrorCode::usage, "--select abstr requires --lexicon");
  }

  const classdiff::LabelMatrix labels =
      classdiff::load_annotations(args.annotations, args.class_list);
  std::optional<classdiff::FeatureMatrix> features;
  if (args.features) {
    features = classdiff::load_feature_matrix(*args.features);
  }
  std::optional<classdiff::ConcretenessLexicon> lexicon;
  if (args.lexicon) {
    lexicon = classdiff::load_lexicon_file(*args.lexicon);
  }

  const classdiff::ProfileSet profiles = classdiff::compute_profiles(
      labels, features ? &*features : nullptr, lexicon ? &*lexicon : nullptr,
      selection, parse_normalization(args.normalize));

  classdiff::Report report = classdiff::make_factor_report(profiles);
  report.inputs.push_back({"annotations", args.annotations,
                           classdiff::digest_file(args.annotations)});
  if (args.class_list) {
    report.inputs.push_back({"classes", *args.class_list,
                             classdiff::digest_file(*args.class_list)});
  }
  if (args.features) {
    report.inputs.push_back({"features", *args.features,
                             classdiff::digest_file(*args.features)});
  }
  if (args.lexicon) {
    report.inputs.push_back({"lexicon", *args.lexicon,
                             classdiff::digest_file(*args.lexicon)});
  }
  stamp(report, args.reproducible);
  classdiff::write_report(args.out, report);
}

struct WeightsArgs {
  std::string factors;
  std::string normalize = "mean1";
  std::string out;
  bool reproducible = false;
};

void run_weights(const WeightsArgs& args) {
  const classdiff::Report factors = classdiff::read_report(args.factors);
  if (factors.classes.empty()) {
    throw Error(ErrorCode::parse_error,
                "factors report contains no classes: " + args.factors);
  }
  std::vector<double> scores;
  scores.reserve(factors.classes.size());
  for (const auto& record : factors.classes) {
    if (!record.score) {
      throw Error(ErrorCode::parse_error,
                  "class '" + record.name + "' has no difficulty score in " +
                      args.factors);
    }
    scores.push_back(*record.score);
  }
  const classdiff::WeightNormalization norm =
      parse_normalization(args.normalize);
  const std::vector<double> weights = classdiff::loss_weights(scores, norm);

  classdiff::Report report;
  report.normalization =
      norm == classdiff::WeightNormalization::mean_one ? "mean_one" : "none";
  for (std::size_t i = 0; i < factors.classes.size(); ++i) {
    classdiff::ReportClass record;
    record.name = factors.classes[i].name;
    record.score = scores[i];
    record.weight = weights[i];
    report.classes.push_back(std::move(record));
  }
  report.inputs.push_back(
      {"factors", args.factors, classdiff::digest_file(args.factors)});
  stamp(report, args.reproducible);
  classdiff::write_report(args.out, report);
}

struct EvaluateArgs {
  std::string predictions;
  std::string annotations;
  std::optional<std::string> class_list;
  std::string out;
  bool reproducible = false;
};

void run_evaluate(const EvaluateArgs& args) {
  const classdiff::LabelMatrix labels =
      classdiff::load_annotations(args.annotations, args.class_list);
  const classdiff::FeatureMatrix predictions =
      classdiff::load_feature_matrix(args.predictions);
  const classdiff::EvaluationReport evaluation =
      classdiff::evaluate(predictions, labels);

  classdiff::Report report = classdiff::make_evaluation_report(evaluation);
  report.inputs.push_back({"predictions", args.predictions,
                           classdiff::digest_file(args.predictions)});
  report.inputs.push_back({"annotations", args.annotations,
                           classdiff::digest_file(args.annotations)});
  if (args.class_list) {
    report.inputs.push_back({"classes", *args.class_list,
                             classdiff::digest_file(*args.class_list)});
  }
  stamp(report, args.reproducible);
  classdiff::write_report(args.out, report);
}

// Factor columns shared by every class record, in canonical order.
std::vector<std::string> common_factors(const classdiff::Report& report) {
  static const char* kCanonical[] = {"frequency", "visual_variation",
                                     "semantic_abstraction", "cooccurrence"};
  std::vector<std::string> names;
  for (const char* name : kCanonical) {
    bool in_all = !report.classes.empty();
    for (const auto& record : report.classes) {
      if (!record.factors.count(name)) {
        in_all = false;
        break;
      }
    }
    if (in_all) names.emplace_back(name);
  }
  return names;
}

std::map<std::string, const classdiff::ReportClass*> by_name(
    const classdiff::Report& report) {
  std::map<std::string, const classdiff::ReportClass*> index;
  for (const auto& record : report.classes) {
    index[record.name] = &record;
  }
  return index;
}

void require_same_classes(
    const classdiff::Report& a, const classdiff::Report& b,
    const std::string& what) {
  std::set<std::string> names_a;
  std::set<std::string> names_b;
  for (const auto& record : a.classes) names_a.insert(record.name);
  for (const auto& record : b.classes) names_b.insert(record.name);
  if (names_a != names_b) {
    throw Error(ErrorCode::shape_mismatch,
                what + ": reports cover different class sets");
  }
}

struct CorrelateArgs {
  std::string factors;
  std::string evaluation;
  std::optional<std::string> out;
  bool reproducible = false;
};

void run_correlate(const CorrelateArgs& args) {
  const classdiff::Report factors = classdiff::read_report(args.factors);
  const classdiff::Report evaluation =
      classdiff::read_report(args.evaluation);
  require_same_classes(factors, evaluation, "correlate");
  const auto eval_index = by_name(evaluation);
  const std::vector<std::string> names = common_factors(factors);
  if (names.empty()) {
    throw Error(ErrorCode::missing_factor,
                "factors report has no factor columns shared by all classes");
  }

  json out_correlations = json::object();
  std::vector<classdiff::Warning> warnings;
  std::printf("%-22s %12s %12s\n", "factor", "vs_ap", "vs_auc");
  for (const auto& factor : names) {
    json entry = json::object();
    for (const char* metric : {"ap", "auc"}) {
      std::vector<double> x;
      std::vector<double> y;
      for (const auto& record : factors.classes) {
        const classdiff::ReportClass* eval = eval_index.at(record.name);
        const std::optional<double>& value =
            metric == std::string("ap") ? eval->ap : eval->auc;
        if (!value) continue;
        x.push_back(record.factors.at(factor));
        y.push_back(*value);
      }
      try {
        entry[metric] = classdiff::pearson(x, y);
      } catch (const Error& e) {
        entry[metric] = nullptr;
        warnings.push_back({std::string(e.code_name()),
                            factor + " vs " + metric + ": " + e.what()});
      }
    }
    const auto cell = [&](const char* metric) {
      return entry[metric].is_null()
                 ? std::string("n/a")
                 : format_double(entry[metric].get<double>()).substr(0, 9);
    };
    std::printf("%-22s %12s %12s\n", factor.c_str(), cell("ap").c_str(),
                cell("auc").c_str());
    out_correlations[factor] = std::move(entry);
  }

  if (args.out) {
    json j;
    j["tool"] = {{"name", classdiff::kToolName},
                 {"version", classdiff::kToolVersion}};
    if (!args.reproducible) {
      j["generated_at"] = classdiff::current_timestamp_utc();
    }
    j["inputs"] = json::array(
        {{{"role", "factors"},
          {"path", args.factors},
          {"digest", classdiff::digest_file(args.factors)}},
         {{"role", "evaluation"},
          {"path", args.evaluation},
          {"digest", classdiff::digest_file(args.evaluation)}}});
    j["correlations"] = std::move(out_correlations);
    json warn = json::array();
    for (const auto& warning : warnings) {
      warn.push_back({{"code", warning.code}, {"detail", warning.detail}});
    }
    j["warnings"] = std::move(warn);
    classdiff::write_json_file(*args.out, j);
  }
}

struct PredictArgs {
  std::string factors_train;
  std::string evaluation_train;
  std::string factors_test;
  bool loocv = false;
  std::string target = "ap";
  std::optional<std::string> out;
  bool reproducible = false;
};

void run_predict(const PredictArgs& args) {
  if (args.target != "ap" && args.target != "auc") {
    throw Error(ErrorCode::usage, "--target must be ap or auc");
  }
  const classdiff::Report train_factors =
      classdiff::read_report(args.factors_train);
  const classdiff::Report train_eval =
      classdiff::read_report(args.evaluation_train);
  const classdiff::Report test_factors =
      classdiff::read_report(args.factors_test);
  require_same_classes(train_factors, train_eval, "predict");

  std::vector<std::string> names = common_factors(train_factors);
  const std::vector<std::string> test_names = common_factors(test_factors);
  std::erase_if(names, [&](const std::string& n) {
    return std::find(test_names.begin(), test_names.end(), n) ==
           test_names.end();
  });
  if (names.empty()) {
    throw Error(ErrorCode::missing_factor,
                "train and test reports share no factor columns");
  }

  const auto eval_index = by_name(train_eval);
  std::vector<std::vector<double>> design;
  std::vector<double> targets;
  std::vector<classdiff::Warning> warnings;
  for (const auto& record : train_factors.classes) {
    const classdiff::ReportClass* eval = eval_index.at(record.name);
    const std::optional<double>& value =
        args.target == "ap" ? eval->ap : eval->auc;
    if (!value) {
      warnings.push_back({"CLASS_EXCLUDED",
                          "class '" + record.name + "' has no " + args.target +
                              "; excluded from the regression"});
      continue;
    }
    std::vector<double> row;
    row.reserve(names.size());
    for (const auto& factor : names) row.push_back(record.factors.at(factor));
    design.push_back(std::move(row));
    targets.push_back(*value);
  }

  const classdiff::RegressionModel model =
      classdiff::fit_ols(design, targets);

  json j;
  j["tool"] = {{"name", classdiff::kToolName},
               {"version", classdiff::kToolVersion}};
  if (!args.reproducible) {
    j["generated_at"] = classdiff::current_timestamp_utc();
  }
  j["target"] = args.target;
  j["factors"] = names;
  json coefficients = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    coefficients[names[i]] = model.coefficients[i];
  }
  j["model"] = {{"coefficients", std::move(coefficients)},
                {"intercept", model.intercept},
                {"ridge_fallback", model.ridge_fallback}};

  std::printf("fitted on %zu classes, %zu factors%s\n", design.size(),
              names.size(), model.ridge_fallback ? " (ridge fallback)" : "");
  if (args.loocv) {
    const classdiff::LoocvResult loocv =
        classdiff::loocv_predict(design, targets);
    std::printf("loocv pearson(predicted, actual) = %.6f\n",
                loocv.pearson_pred_actual);
    j["loocv"] = {{"pearson", loocv.pearson_pred_actual},
                  {"predictions", loocv.predictions}};
  }

  json predictions = json::array();
  std::printf("%-24s %12s\n", "class", ("pred_" + args.target).c_str());
  for (const auto& record : test_factors.classes) {
    std::vector<double> row;
    row.reserve(names.size());
    for (const auto& factor : names) row.push_back(record.factors.at(factor));
    const double value = model.predict(row);
    std::printf("%-24s %12.6f\n", record.name.c_str(), value);
    predictions.push_back({{"name", record.name}, {"predicted", value}});
  }
  j["predictions"] = std::move(predictions);
  json warn = json::array();
  for (const auto& warning : warnings) {
    warn.push_back({{"code", warning.code}, {"detail", warning.detail}});
  }
  j["warnings"] = std::move(warn);
  if (args.out) classdiff::write_json_file(*args.out, j);
}

struct TrainArgs {
  std::string annotations;
  std::optional<std::string> class_list;
  std::string features;
  std::optional<std::string> weights;
  std::string config;
  std::string out;
  std::optional<std::string> trace;
  std::optional<std::string> out_predictions;
};

void run_train(const TrainArgs& args) {
  const classdiff::LabelMatrix labels =
      classdiff::load_annotations(args.annotations, args.class_list);
  const classdiff::FeatureMatrix features =
      classdiff::load_feature_matrix(args.features);
  classdiff::TrainConfig config = classdiff::load_train_config(args.config);

  if (args.weights) {
    const classdiff::Report weight_report =
        classdiff::read_report(*args.weights);
    std::map<std::string, double> weight_by_name;
    for (const auto& record : weight_report.classes) {
      if (!record.weight) {
        throw Error(ErrorCode::parse_error,
                    "class '" + record.name + "' has no weight in " +
                        *args.weights);
      }
      weight_by_name[record.name] = *record.weight;
    }
    std::vector<double> class_weights;
    class_weights.reserve(labels.n_classes());
    for (const auto& name : labels.class_names()) {
      const auto it = weight_by_name.find(name);
      if (it == weight_by_name.end()) {
        throw Error(ErrorCode::shape_mismatch,
                    "weight file lacks class '" + name + "'");
      }
      class_weights.push_back(it->second);
    }
    config.class_weights = std::move(class_weights);
  }

  const classdiff::TrainResult result =
      classdiff::train(labels, features, config);
  classdiff::save_model(args.out, result.model);

  if (args.trace) {
    std::string csv = "iteration,loss\n";
    for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
      csv += std::to_string(i + 1);
      csv += ',';
      csv += format_double(result.loss_trace[i]);
      csv += '\n';
    }
    std::ofstream out(*args.trace, std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io_error,
                  "cannot open trace file: " + *args.trace);
    }
    out << csv;
  }
  if (args.out_predictions) {
    classdiff::save_feature_matrix(
        *args.out_predictions,
        classdiff::predict_all(result.model, features));
  }
}

struct SynthArgs {
  std::string config;
  std::string out_annotations;
  std::string out_features;
};

void run_synth(const SynthArgs& args) {
  const classdiff::SynthConfig config =
      classdiff::load_synth_config(args.config);
  const classdiff::SynthDataset dataset = classdiff::generate(config);
  classdiff::save_annotations(args.out_annotations, dataset.labels);
  classdiff::save_feature_matrix(args.out_features, dataset.features);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class-level difficulty factors for multi-label datasets"};
  app.require_subcommand(1);

  FactorsArgs factors_args;
  CLI::App* factors = app.add_subcommand(
      "factors", "compute per-class difficulty factors and loss weights");
  factors->add_option("--annotations", factors_args.annotations,
                      "JSONL annotation file")->required();
  factors->add_option("--classes", factors_args.class_list,
                      "class list fixing column order");
  factors->add_option("--features", factors_args.features,
                      "DFMX1 feature matrix (for visvar)");
  factors->add_option("--lexicon", factors_args.lexicon,
                      "TSV concreteness lexicon (for abstr)");
  factors->add_option("--select", factors_args.select,
                      "comma list of freq,visvar,abstr,cooc")->required();
  factors->add_option("--normalize", factors_args.normalize,
                      "weight normalization: none|mean1 (default mean1)");
  factors->add_option("--out", factors_args.out, "output report path")
      ->required();
  factors->add_flag("--reproducible", factors_args.reproducible,
                    "omit the timestamp for byte-identical reruns");

  WeightsArgs weights_args;
  CLI::App* weights = app.add_subcommand(
      "weights", "derive loss weights from a factors report");
  weights->add_option("--factors", weights_args.factors,
                      "factors report")->required();
  weights->add_option("--normalize", weights_args.normalize,
                      "none|mean1 (default mean1)");
  weights->add_option("--out", weights_args.out, "output report path")
      ->required();
  weights->add_flag("--reproducible", weights_args.reproducible,
                    "omit the timestamp for byte-identical reruns");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "per-class AP/AUC with aggregates and box-plot stats");
  evaluate->add_option("--predictions", evaluate_args.predictions,
                       "DFMX1 score matrix")->required();
  evaluate->add_option("--annotations", evaluate_args.annotations,
                       "JSONL annotation file")->required();
  evaluate->add_option("--classes", evaluate_args.class_list,
                       "class list fixing column order");
  evaluate->add_option("--out", evaluate_args.out, "output report path")
      ->required();
  evaluate->add_flag("--reproducible", evaluate_args.reproducible,
                     "omit the timestamp for byte-identical reruns");

  CorrelateArgs correlate_args;
  CLI::App* correlate = app.add_subcommand(
      "correlate", "Pearson correlation of each factor against AP and AUC");
  correlate->add_option("--factors", correlate_args.factors,
                        "factors report")->required();
  correlate->add_option("--evaluation", correlate_args.evaluation,
                        "evaluation report")->required();
  correlate->add_option("--out", correlate_args.out, "optional JSON output");
  correlate->add_flag("--reproducible", correlate_args.reproducible,
                      "omit the timestamp for byte-identical reruns");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand(
      "predict", "regress performance on factors; apply across datasets");
  predict->add_option("--factors-train", predict_args.factors_train,
                      "factors report of the fitting dataset")->required();
  predict->add_option("--evaluation-train", predict_args.evaluation_train,
                      "evaluation report of the fitting dataset")->required();
  predict->add_option("--factors-test", predict_args.factors_test,
                      "factors report to predict for")->required();
  predict->add_flag("--loocv", predict_args.loocv,
                    "also report leave-one-out correlation on the train set");
  predict->add_option("--target", predict_args.target,
                      "ap|auc (default ap)");
  predict->add_option("--out", predict_args.out, "optional JSON output");
  predict->add_flag("--reproducible", predict_args.reproducible,
                    "omit the timestamp for byte-identical reruns");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "momentum-SGD sigmoid linear model with optional class weights");
  train->add_option("--annotations", train_args.annotations,
                    "JSONL annotation file")->required();
  train->add_option("--classes", train_args.class_list,
                    "class list fixing column order");
  train->add_option("--features", train_args.features,
                    "DFMX1 feature matrix")->required();
  train->add_option("--weights", train_args.weights,
                    "weights report for difficulty-weighted loss");
  train->add_option("--config", train_args.config,
                    "training config JSON")->required();
  train->add_option("--out", train_args.out, "output DWLM1 model path")
      ->required();
  train->add_option("--trace", train_args.trace, "per-iteration loss CSV");
  train->add_option("--out-predictions", train_args.out_predictions,
                    "write model scores on the training features as DFMX1");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "generate a seeded synthetic multi-label dataset");
  synth->add_option("--config", synth_args.config, "synth config JSON")
      ->required();
  synth->add_option("--out-annotations", synth_args.out_annotations,
                    "JSONL output path")->required();
  synth->add_option("--out-features", synth_args.out_features,
                    "DFMX1 output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR USAGE: " << e.what() << "\n";
    return 1;
  }

  try {
    if (factors->parsed()) run_factors(factors_args);
    if (weights->parsed()) run_weights(weights_args);
    if (evaluate->parsed()) run_evaluate(evaluate_args);
    if (correlate->parsed()) run_correlate(correlate_args);
    if (predict->parsed()) run_predict(predict_args);
    if (train->parsed()) run_train(train_args);
    if (synth->parsed()) run_synth(synth_args);
  } catch (const Error& e) {
    std::cerr << "ERROR " << e.code_name() << ": " << e.what() << "\n";
    return e.code() == ErrorCode::usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR INTERNAL: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
