#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"

namespace gaitmask {

struct SmoOptions {
  double kkt_tolerance = 1e-3;
  // Budget expressed in kernel evaluations; each SMO iteration touches one
  // row pair of the cached kernel, i.e. 2n entries.
  long max_kernel_evals = 10'000'000;
};

// One binary RBF machine trained by SMO on the rows of two classes.
struct BinarySvm {
  int positive_class = 0;  // lower class index maps to y = +1
  int negative_class = 0;
  double gamma = 0.0;
  double C = 0.0;
  double bias = 0.0;                 // decision(x) = sum alpha_i y_i K(sv_i, x) + bias
  Eigen::MatrixXd support_vectors;   // rows
  Eigen::VectorXd sv_coeff;          // alpha_i * y_i per support vector
  // Diagnostics for the dual-feasibility contract.
  Eigen::VectorXd alpha;             // every training row
  Eigen::VectorXd labels;            // +-1 per training row
  double sum_alpha_y = 0.0;
  bool cap_reached = false;
  long iterations = 0;

  double decision(const Eigen::RowVectorXd& x) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
      double d2 = (support_vectors.row(i) - x).squaredNorm();
      acc += sv_coeff[i] * std::exp(-gamma * d2);
    }
    return acc + bias;
  }
};

// Test instrumentation: invoked after every binary fit (including the ones
// inside cross-validation) when set.
inline std::function<void(const BinarySvm&)>& svm_fit_hook() {
  static std::function<void(const BinarySvm&)> hook;
  return hook;
}

namespace detail {

// SMO with maximal-violating-pair working set selection on
//   min 1/2 a^T Q a - e^T a,  0 <= a <= C,  y^T a = 0,
// where Q_ij = y_i y_j K(x_i, x_j).
inline BinarySvm solve_binary_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                                  double gamma, const SmoOptions& opt) {
  const Eigen::Index n = X.rows();
  constexpr double kTau = 1e-12;

  // Cached kernel matrix. Pairwise squared distances via the Gram expansion.
  Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd K = -2.0 * (X * X.transpose());
  K.colwise() += sq;
  K.rowwise() += sq.transpose();
  K = (-gamma * K.array()).exp().matrix();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  long max_iterations = std::max<long>(opt.max_kernel_evals / std::max<Eigen::Index>(2 * n, 1), 1000);
  bool cap_reached = false;
  long iter = 0;
  for (;; ++iter) {
    if (iter >= max_iterations) {
      cap_reached = true;
      break;
    }
    // i: most violating among I_up; j: most violating among I_low.
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
      double v = -y[t] * grad[t];
      if (in_up && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_up - m_low < opt.kkt_tolerance) break;

    double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      // Direction e_i + e_j: curvature Q_ii + 2Q_ij + Q_jj with Q_ij = -K_ij.
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      double delta = (-grad[i] - grad[j]) / quad;
      double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = C + diff;
        }
      }
    } else {
      // Direction e_i - e_j: curvature Q_ii - 2Q_ij + Q_jj with Q_ij = +K_ij.
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      double delta = (grad[i] - grad[j]) / quad;
      double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    double dai = alpha[i] - old_ai;
    double daj = alpha[j] - old_aj;
    if (dai == 0.0 && daj == 0.0) break;  // numerically stuck pair
    for (Eigen::Index t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * K(i, t) * dai + y[j] * K(j, t) * daj);
  }

  // Bias from the KKT conditions: average over free vectors, midpoint of the
  // bound-derived bracket otherwise.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;

  BinarySvm model;
  model.gamma = gamma;
  model.C = C;
  model.bias = -rho;
  model.alpha = alpha;
  model.labels = y;
  model.sum_alpha_y = (alpha.array() * y.array()).sum();
  model.cap_reached = cap_reached;
  model.iterations = iter;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  model.sv_coeff.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = X.row(sv[s]);
    model.sv_coeff[static_cast<Eigen::Index>(s)] = alpha[sv[s]] * y[sv[s]];
  }
  return model;
}

}  // namespace detail

// One-vs-one multiclass RBF SVM.
struct SVMModel {
  std::vector<int> classes;  // ascending
  std::vector<BinarySvm> machines;
  double C = 0.0;
  double gamma = 0.0;

  bool cap_reached() const {
    for (const auto& m : machines)
      if (m.cap_reached) return true;
    return false;
  }

  int predict(const Eigen::RowVectorXd& x) const {
    std::vector<int> votes(classes.size(), 0);
    for (const auto& m : machines) {
      double d = m.decision(x);
      int cls = d >= 0.0 ? m.positive_class : m.negative_class;
      for (std::size_t c = 0; c < classes.size(); ++c)
        if (classes[c] == cls) {
          ++votes[c];
          break;
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes.size(); ++c)
      if (votes[c] > votes[best]) best = c;  // ties keep the lowest class index
    return classes[best];
  }

  std::vector<int> predict(const Eigen::MatrixXd& X) const {
    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      Eigen::RowVectorXd row = X.row(r);
      out[static_cast<std::size_t>(r)] = predict(row);
    }
    return out;
  }
};

inline SVMModel train_svm(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                          double gamma, const SmoOptions& opt = {}) {
  if (C <= 0.0 || gamma <= 0.0)
    raise(Errc::non_positive_hyperparameter, "C and gamma must be positive");
  if (static_cast<Eigen::Index>(y.size()) != X.rows())
    raise(Errc::length_mismatch, "label count does not match row count");
  std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2)
    raise(Errc::single_class, "training data must contain at least 2 classes");

  SVMModel model;
  model.C = C;
  model.gamma = gamma;
  model.classes.assign(distinct.begin(), distinct.end());

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      int ca = model.classes[a], cb = model.classes[b];
      std::vector<Eigen::Index> rows;
      for (std::size_t r = 0; r < y.size(); ++r)
        if (y[r] == ca || y[r] == cb) rows.push_back(static_cast<Eigen::Index>(r));
      Eigen::MatrixXd Xp(static_cast<Eigen::Index>(rows.size()), X.cols());
      Eigen::VectorXd yp(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        Xp.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
        yp[static_cast<Eigen::Index>(r)] = y[static_cast<std::size_t>(rows[r])] == ca ? 1.0 : -1.0;
      }
      BinarySvm bin = detail::solve_binary_svm(Xp, yp, C, gamma, opt);
      bin.positive_class = ca;
      bin.negative_class = cb;
      if (svm_fit_hook()) svm_fit_hook()(bin);
      model.machines.push_back(std::move(bin));
    }
  }
  return model;
}

}  // namespace gaitmask
