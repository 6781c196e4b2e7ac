#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitmask/cross_validation.hpp"
#include "gaitmask/defaults.hpp"
#include "gaitmask/errors.hpp"
#include "gaitmask/features.hpp"
#include "gaitmask/model_io.hpp"
#include "gaitmask/pca.hpp"
#include "gaitmask/scaler.hpp"
#include "gaitmask/sinusoid.hpp"
#include "gaitmask/splits.hpp"
#include "gaitmask/svm.hpp"
#include "gaitmask/threading.hpp"

namespace gaitmask {

struct LearnerConfig {
  std::vector<double> c_values{std::begin(defaults::kCValues), std::end(defaults::kCValues)};
  std::vector<double> gamma_factors{std::begin(defaults::kGammaFactors),
                                    std::end(defaults::kGammaFactors)};
  int folds = defaults::kCvFolds;
  double variance_fraction = defaults::kVarianceFraction;
  SmoOptions smo;
};

struct ExperimentConfig {
  Task task = Task::identity;
  Pipeline pipeline;
  std::vector<Encoding> encodings{Encoding::flatten, Encoding::reduced_angles};
  double train_fraction = defaults::kTrainFraction;
  int repetitions = defaults::kRepetitions;
  std::uint64_t base_seed = 0;
  LearnerConfig learner;
  int threads = 1;
  bool capture_diagnostics = false;
};

// Per (repetition, encoding) instrumentation used by the leakage tests.
struct RunDiagnostics {
  int repetition = 0;
  Encoding encoding = Encoding::flatten;
  std::vector<std::pair<std::string, std::string>> train_rows, test_rows;
  Eigen::VectorXd scaler_mean, scaler_stddev;
  Eigen::VectorXd pca_mean;
  int pca_k = 0;
  double selected_C = 0.0, selected_gamma = 0.0;
  int folds_used = 0;
};

struct QuartileSummary {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Linear-interpolation quantile on the sorted values.
inline QuartileSummary summarize_quartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  auto q = [&values](double p) {
    if (values.size() == 1) return values[0];
    double pos = p * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= values.size() - 1) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return {values.front(), q(0.25), q(0.5), q(0.75), values.back()};
}

struct EncodingOutcome {
  Encoding encoding = Encoding::flatten;
  std::vector<double> run_accuracies;   // one per repetition
  QuartileSummary quartiles;
  long degenerate_segments = 0;
  std::vector<std::pair<double, double>> selected_params;  // (C, gamma) per repetition
  std::vector<bool> smo_cap_reached;                       // per repetition
};

struct ExperimentResult {
  Task task = Task::identity;
  std::string pipeline_text;
  double train_fraction = 0.0;
  int repetitions = 0;
  std::uint64_t base_seed = 0;
  std::vector<EncodingOutcome> encodings;
  Encoding reported_encoding = Encoding::flatten;  // higher median of the two
  double chance_level = 0.0;
  double wall_clock_s = 0.0;
  std::vector<RunDiagnostics> diagnostics;  // only when capture_diagnostics
};

namespace detail {

struct SingleRun {
  double test_accuracy = 0.0;
  long degenerate_segments = 0;
  std::pair<double, double> selected = {0.0, 0.0};
  bool cap_reached = false;
  RunDiagnostics diag;
};

inline SingleRun run_once(const Dataset& perturbed, const ExperimentConfig& config, int repetition,
                          Encoding encoding) {
  std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(repetition);
  Split split = make_split(perturbed, config.task, config.train_fraction, seed);

  auto collect = [&perturbed](const std::vector<SampleRef>& refs) {
    std::vector<const GaitSample*> out;
    out.reserve(refs.size());
    for (const auto& r : refs)
      out.push_back(&perturbed.subjects[static_cast<std::size_t>(r.subject)]
                         .samples[static_cast<std::size_t>(r.sample)]);
    return out;
  };
  std::vector<const GaitSample*> train_samples = collect(split.train);
  std::vector<const GaitSample*> test_samples = collect(split.test);

  auto labels_for = [&perturbed, &config](const std::vector<SampleRef>& refs) {
    std::vector<int> y;
    y.reserve(refs.size());
    for (const auto& r : refs) {
      const auto& subj = perturbed.subjects[static_cast<std::size_t>(r.subject)];
      y.push_back(config.task == Task::identity ? r.subject : (subj.sex == Sex::female ? 0 : 1));
    }
    return y;
  };
  std::vector<int> y_train = labels_for(split.train);
  std::vector<int> y_test = labels_for(split.test);

  FeatureMatrix train_fm = encode_samples(train_samples, encoding, perturbed.body_parts);
  FeatureMatrix test_fm = encode_samples(test_samples, encoding, perturbed.body_parts);

  // The entire recognition stack is fitted on the train partition only.
  ScalerModel scaler = fit_scaler(train_fm.X);
  Eigen::MatrixXd train_scaled = scaler.apply(train_fm.X);
  Eigen::MatrixXd test_scaled = scaler.apply(test_fm.X);
  PCAModel pca = fit_pca(train_scaled, config.learner.variance_fraction);
  Eigen::MatrixXd train_red = pca.transform(train_scaled);
  Eigen::MatrixXd test_red = pca.transform(test_scaled);

  double pooled_var =
      train_red.size() > 0
          ? (train_red.array() - train_red.mean()).square().sum() /
                static_cast<double>(train_red.size())
          : 0.0;
  double g = 1.0 / (static_cast<double>(std::max<Eigen::Index>(train_red.cols(), 1)) *
                    std::max(pooled_var, 1e-12));
  std::vector<GridPoint> grid;
  for (double c : config.learner.c_values)
    for (double f : config.learner.gamma_factors) grid.push_back({c, f * g});

  CVReport cv = cross_validate(train_red, y_train, grid, config.learner.folds,
                               derive_seed(seed, "cv", static_cast<std::uint64_t>(encoding ==
                                                                                  Encoding::flatten
                                                                              ? 0
                                                                              : 1)),
                               config.learner.smo);
  SVMModel svm = train_svm(train_red, y_train, cv.selected_C, cv.selected_gamma,
                           config.learner.smo);

  SingleRun run;
  run.test_accuracy = accuracy(svm.predict(test_red), y_test);
  run.degenerate_segments = train_fm.degenerate_segments + test_fm.degenerate_segments;
  run.selected = {cv.selected_C, cv.selected_gamma};
  run.cap_reached = svm.cap_reached();
  if (config.capture_diagnostics) {
    run.diag.repetition = repetition;
    run.diag.encoding = encoding;
    run.diag.train_rows = train_fm.provenance;
    run.diag.test_rows = test_fm.provenance;
    run.diag.scaler_mean = scaler.mean;
    run.diag.scaler_stddev = scaler.stddev;
    run.diag.pca_mean = pca.mean;
    run.diag.pca_k = pca.k;
    run.diag.selected_C = cv.selected_C;
    run.diag.selected_gamma = cv.selected_gamma;
    run.diag.folds_used = cv.folds_used;
  }
  return run;
}

}  // namespace detail

inline double chance_level(const Dataset& ds, Task task, const ExperimentConfig& config) {
  if (task == Task::identity)
    return ds.subjects.empty() ? 0.0 : 1.0 / static_cast<double>(ds.subjects.size());
  // Sex task: majority share of the test side. The rounding rule fixes the
  // test-side composition independent of the seed, so repetition 0 is
  // representative.
  Split split = split_sex(ds, config.train_fraction, config.base_seed);
  std::size_t female = 0;
  for (const auto& r : split.test)
    if (ds.subjects[static_cast<std::size_t>(r.subject)].sex == Sex::female) ++female;
  std::size_t total = split.test.size();
  if (total == 0) return 0.5;
  std::size_t majority = std::max(female, total - female);
  return static_cast<double>(majority) / static_cast<double>(total);
}

inline ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
  if (config.repetitions < 1) raise(Errc::invalid_params, "repetitions must be >= 1");
  if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0)
    raise(Errc::invalid_params, "train fraction must be in (0, 1)");
  if (config.encodings.empty()) raise(Errc::invalid_params, "need at least one encoding");
  config.pipeline.validate();
  if (config.pipeline.dataset_scoped() && dataset.subjects.size() < 1)
    raise(Errc::scope_mismatch, "dataset-scoped pipeline needs a dataset");

  auto t0 = std::chrono::steady_clock::now();

  // Dataset-scoped steps (equalization) fit on the whole dataset before the
  // split: group-level averaging is defined over all individuals.
  Dataset perturbed = apply_pipeline(dataset, config.pipeline);

  struct Task1 {
    int repetition;
    Encoding encoding;
  };
  std::vector<Task1> tasks;
  for (int r = 0; r < config.repetitions; ++r)
    for (Encoding e : config.encodings) tasks.push_back({r, e});
  std::vector<detail::SingleRun> runs(tasks.size());

  parallel_for_indexed(tasks.size(), config.threads, [&](std::size_t i) {
    try {
      runs[i] = detail::run_once(perturbed, config, tasks[i].repetition, tasks[i].encoding);
    } catch (const Error& e) {
      raise(e.code(), std::string(e.what()) + " (repetition " +
                          std::to_string(tasks[i].repetition) + ", encoding " +
                          encoding_name(tasks[i].encoding) + ")");
    }
  });

  ExperimentResult result;
  result.task = config.task;
  result.pipeline_text = config.pipeline.format();
  result.train_fraction = config.train_fraction;
  result.repetitions = config.repetitions;
  result.base_seed = config.base_seed;
  result.chance_level = chance_level(dataset, config.task, config);

  for (Encoding e : config.encodings) {
    EncodingOutcome outcome;
    outcome.encoding = e;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].encoding != e) continue;
      outcome.run_accuracies.push_back(runs[i].test_accuracy);
      outcome.degenerate_segments += runs[i].degenerate_segments;
      outcome.selected_params.push_back(runs[i].selected);
      outcome.smo_cap_reached.push_back(runs[i].cap_reached);
      if (config.capture_diagnostics) result.diagnostics.push_back(runs[i].diag);
    }
    outcome.quartiles = summarize_quartiles(outcome.run_accuracies);
    result.encodings.push_back(std::move(outcome));
  }

  // Best-of-two reporting by median; ties keep the first configured encoding.
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.encodings.size(); ++i)
    if (result.encodings[i].quartiles.median > result.encodings[best].quartiles.median) best = i;
  result.reported_encoding = result.encodings[best].encoding;

  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace gaitmask
