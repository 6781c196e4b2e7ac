#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"
#include "gaitmask/rng.hpp"
#include "gaitmask/svm.hpp"

namespace gaitmask {

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    raise(Errc::length_mismatch, "prediction and truth lengths differ");
  if (predicted.empty()) raise(Errc::empty_input, "accuracy of zero samples is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

struct GridPoint {
  double C = 1.0;
  double gamma = 1.0;
};

struct CVEntry {
  double C = 0.0;
  double gamma = 0.0;
  double mean_accuracy = 0.0;
};

struct CVReport {
  std::vector<CVEntry> grid;
  double selected_C = 0.0;
  double selected_gamma = 0.0;
  int requested_folds = 0;
  int folds_used = 0;
};

// sklearn-style default: gamma = 1 / (n_features * Var(all entries)), bracketed
// a decade in both directions; C spans 0.01..1000.
inline std::vector<GridPoint> default_grid(const Eigen::MatrixXd& X) {
  double var = X.size() > 0
                   ? (X.array() - X.mean()).square().sum() / static_cast<double>(X.size())
                   : 0.0;
  double d = static_cast<double>(std::max<Eigen::Index>(X.cols(), 1));
  double g = 1.0 / (d * std::max(var, 1e-12));
  std::vector<GridPoint> grid;
  for (double c : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0})
    for (double f : {0.1, 1.0, 10.0}) grid.push_back({c, f * g});
  return grid;
}

// Stratified fold assignment: per class, shuffle rows and deal round-robin.
inline std::vector<int> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  std::vector<int> fold_of(y.size(), 0);
  int class_rank = 0;
  for (auto& [cls, rows] : by_class) {
    Rng rng(derive_seed(seed, "cv-fold", static_cast<std::uint64_t>(class_rank)));
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      fold_of[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    ++class_rank;
  }
  return fold_of;
}

inline CVReport cross_validate(const Eigen::MatrixXd& X, const std::vector<int>& y,
                               const std::vector<GridPoint>& grid, int folds, std::uint64_t seed,
                               const SmoOptions& opt = {}) {
  if (static_cast<Eigen::Index>(y.size()) != X.rows())
    raise(Errc::length_mismatch, "label count does not match row count");
  std::map<int, int> counts;
  for (int c : y) counts[c]++;
  if (counts.size() < 2) raise(Errc::single_class, "cross-validation needs at least 2 classes");
  int min_count = y.size() ? counts.begin()->second : 0;
  for (auto& [cls, n] : counts) min_count = std::min(min_count, n);

  CVReport report;
  report.requested_folds = folds;
  report.folds_used = std::max(2, std::min(folds, min_count));

  std::vector<int> fold_of = stratified_folds(y, report.folds_used, seed);

  for (const auto& gp : grid) {
    double acc_sum = 0.0;
    for (int f = 0; f < report.folds_used; ++f) {
      std::vector<Eigen::Index> train_rows, test_rows;
      for (std::size_t i = 0; i < y.size(); ++i)
        (fold_of[i] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
      if (test_rows.empty() || train_rows.empty()) continue;
      Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(train_rows.size()), X.cols());
      std::vector<int> ytr(train_rows.size());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        Xtr.row(static_cast<Eigen::Index>(i)) = X.row(train_rows[i]);
        ytr[i] = y[static_cast<std::size_t>(train_rows[i])];
      }
      Eigen::MatrixXd Xte(static_cast<Eigen::Index>(test_rows.size()), X.cols());
      std::vector<int> yte(test_rows.size());
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        Xte.row(static_cast<Eigen::Index>(i)) = X.row(test_rows[i]);
        yte[i] = y[static_cast<std::size_t>(test_rows[i])];
      }
      SVMModel model = train_svm(Xtr, ytr, gp.C, gp.gamma, opt);
      acc_sum += accuracy(model.predict(Xte), yte);
    }
    report.grid.push_back({gp.C, gp.gamma, acc_sum / static_cast<double>(report.folds_used)});
  }

  // Highest mean accuracy; ties resolve to the smallest C, then smallest gamma.
  const CVEntry* best = nullptr;
  for (const auto& e : report.grid) {
    if (!best || e.mean_accuracy > best->mean_accuracy ||
        (e.mean_accuracy == best->mean_accuracy &&
         (e.C < best->C || (e.C == best->C && e.gamma < best->gamma))))
      best = &e;
  }
  if (!best) raise(Errc::empty_input, "empty hyperparameter grid");
  report.selected_C = best->C;
  report.selected_gamma = best->gamma;
  return report;
}

inline std::string cv_report_csv(const CVReport& report) {
  std::string out = "C,gamma,mean_accuracy,selected\n";
  for (const auto& e : report.grid) {
    char buf[128];
    int sel = e.C == report.selected_C && e.gamma == report.selected_gamma ? 1 : 0;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", e.C, e.gamma, e.mean_accuracy, sel);
    out += buf;
  }
  return out;
}

}  // namespace gaitmask
