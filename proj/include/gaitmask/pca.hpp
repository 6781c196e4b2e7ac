#pragma once

#include <algorithm>
#include <string>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"

namespace gaitmask {

struct PCAModel {
  Eigen::VectorXd mean;                 // column means of the training matrix
  Eigen::MatrixXd components;           // d x k, orthonormal columns, variance-ordered
  Eigen::VectorXd explained_variance;   // k entries, non-increasing
  double total_variance = 0.0;          // trace of the sample covariance
  int k = 0;                            // retained component count

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean.transpose()) * components;
  }

  Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& Y) const {
    return (Y * components.transpose()).rowwise() + mean.transpose();
  }
};

// PCA of the sample covariance (ddof = 1). When rows <= cols the
// eigenproblem is solved on the Gram matrix instead of the full covariance;
// at this project's shapes (hundreds of rows, up to ~18600 columns) the
// covariance route is not feasible.
inline PCAModel fit_pca(const Eigen::MatrixXd& X, double variance_fraction = 0.95,
                        int max_components = -1) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n < 2 || d < 1)
    raise(Errc::empty_matrix, "fit_pca needs at least 2 rows, got " + std::to_string(n));

  PCAModel model;
  model.mean = X.colwise().mean();
  Eigen::MatrixXd Xc = X.rowwise() - model.mean.transpose();
  const double ddof = static_cast<double>(n - 1);
  model.total_variance = Xc.squaredNorm() / ddof;

  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd components;    // d x (#computed)
  if (n <= d) {
    Eigen::MatrixXd gram = (Xc * Xc.transpose()) / ddof;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) raise(Errc::degenerate_data, "eigensolver failed");
    // Ascending from Eigen; keep directions with meaningfully positive spread
    // (null-space vectors of the Gram matrix cannot be mapped to pose space).
    const Eigen::VectorXd& ev = solver.eigenvalues();
    double floor = std::max(ev.cwiseAbs().maxCoeff() * 1e-12, 1e-30);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
      if (ev[i] > floor) keep.push_back(i);
    eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
    components.resize(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t idx = 0; idx < keep.size(); ++idx) {
      double lambda = ev[keep[idx]];
      eigenvalues[static_cast<Eigen::Index>(idx)] = lambda;
      Eigen::VectorXd v = Xc.transpose() * solver.eigenvectors().col(keep[idx]);
      components.col(static_cast<Eigen::Index>(idx)) = v / std::sqrt(lambda * ddof);
    }
  } else {
    Eigen::MatrixXd cov = (Xc.transpose() * Xc) / ddof;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) raise(Errc::degenerate_data, "eigensolver failed");
    eigenvalues.resize(d);
    components.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double lambda = solver.eigenvalues()[d - 1 - i];
      eigenvalues[i] = lambda > 0.0 ? lambda : 0.0;
      components.col(i) = solver.eigenvectors().col(d - 1 - i);
    }
  }

  int cap = static_cast<int>(std::min<Eigen::Index>(n - 1, d));
  cap = std::min<int>(cap, static_cast<int>(eigenvalues.size()));
  if (max_components > 0) cap = std::min(cap, max_components);
  cap = std::max(cap, 1);
  cap = std::min<int>(cap, static_cast<int>(components.cols()));

  int k = 1;
  if (model.total_variance > 0.0 && variance_fraction < 1.0) {
    double cum = 0.0;
    k = cap;
    for (int i = 0; i < cap; ++i) {
      cum += eigenvalues[i];
      if (cum / model.total_variance >= variance_fraction) {
        k = i + 1;
        break;
      }
    }
  } else {
    k = cap;
  }
  if (components.cols() == 0) {
    // All-constant input: keep a single arbitrary direction with zero variance.
    model.components = Eigen::MatrixXd::Zero(d, 1);
    model.components(0, 0) = 1.0;
    model.explained_variance = Eigen::VectorXd::Zero(1);
    model.k = 1;
    return model;
  }
  model.components = components.leftCols(k);
  model.explained_variance = eigenvalues.head(k);
  model.k = k;
  return model;
}

// Deterministically extends a (possibly rank-deficient) component set to
// `want` orthonormal columns by Gram-Schmidt against the canonical basis.
inline Eigen::MatrixXd pad_orthonormal(const Eigen::MatrixXd& components, int want) {
  const Eigen::Index d = components.rows();
  Eigen::MatrixXd out(d, want);
  int have = static_cast<int>(components.cols());
  if (have > want) have = want;
  out.leftCols(have) = components.leftCols(have);
  int filled = have;
  for (Eigen::Index e = 0; e < d && filled < want; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v[e] = 1.0;
    for (int i = 0; i < filled; ++i) v -= out.col(i).dot(v) * out.col(i);
    double norm = v.norm();
    if (norm > 1e-6) {
      out.col(filled) = v / norm;
      ++filled;
    }
  }
  if (filled < want) raise(Errc::degenerate_data, "cannot complete orthonormal basis");
  return out;
}

}  // namespace gaitmask
