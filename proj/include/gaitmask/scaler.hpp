#pragma once

#include <string>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"

namespace gaitmask {

// Per-feature standardization: subtract the mean, divide by the population
// standard deviation. Near-constant features pass through centered.
struct ScalerModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // as computed; entries below the floor act as 1

  static constexpr double kSigmaFloor = 1e-12;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out = X.rowwise() - mean.transpose();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      double sd = stddev[j];
      if (sd >= kSigmaFloor) out.col(j) /= sd;
    }
    return out;
  }
};

inline ScalerModel fit_scaler(const Eigen::MatrixXd& X) {
  if (X.rows() < 2)
    raise(Errc::empty_matrix, "fit_scaler needs at least 2 rows, got " + std::to_string(X.rows()));
  ScalerModel m;
  m.mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - m.mean.transpose();
  m.stddev = (centered.array().square().colwise().mean()).sqrt();
  return m;
}

inline Eigen::MatrixXd apply_scaler(const ScalerModel& model, const Eigen::MatrixXd& X) {
  return model.apply(X);
}

}  // namespace gaitmask
