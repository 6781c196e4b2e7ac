#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"
#include "gaitmask/pca.hpp"
#include "gaitmask/perturb.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

// Subject-level gait representation: mean pose, four eigenpostures, and a
// sinusoid per eigenposture score over the stride.
struct SinusoidGaitModel {
  Eigen::VectorXd mean_pose;     // 3M
  Eigen::MatrixXd components;    // 3M x 4, orthonormal columns
  std::array<double, 4> amplitude{};   // mm, >= 0
  std::array<double, 4> frequency{};   // cycles per stride, > 0
  std::array<double, 4> phase{};       // radians
  double residual_rms = 0.0;           // reconstruction RMS over all channels
  int frames = 100;
};

namespace detail {

inline Eigen::VectorXd pose_to_vector(const Pose& pose) {
  Eigen::VectorXd v(3 * static_cast<Eigen::Index>(pose.size()));
  for (std::size_t j = 0; j < pose.size(); ++j) {
    v[3 * static_cast<Eigen::Index>(j) + 0] = pose[j].x;
    v[3 * static_cast<Eigen::Index>(j) + 1] = pose[j].y;
    v[3 * static_cast<Eigen::Index>(j) + 2] = pose[j].z;
  }
  return v;
}

inline Pose vector_to_pose(const Eigen::VectorXd& v) {
  Pose pose(static_cast<std::size_t>(v.size() / 3));
  for (std::size_t j = 0; j < pose.size(); ++j) {
    pose[j].x = v[3 * static_cast<Eigen::Index>(j) + 0];
    pose[j].y = v[3 * static_cast<Eigen::Index>(j) + 1];
    pose[j].z = v[3 * static_cast<Eigen::Index>(j) + 2];
  }
  return pose;
}

struct SinusoidFit {
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;  // DC nuisance term, folded back into the mean pose
};

// Least-squares a*sin(2*pi*f*t/T + phi) + d over pooled per-sample score
// series. For a fixed frequency the problem is linear in (A, B, d) with
// a*sin(theta+phi) = A*sin(theta) + B*cos(theta); the frequency itself is
// searched on a grid and then refined by golden-section. The intercept d
// matters because scores are centered on the pooled mean: a sinusoid with a
// non-integer cycle count has nonzero mean over the stride, and without d
// its frequency estimate is biased by several percent.
inline SinusoidFit fit_score_sinusoid(const std::vector<std::vector<double>>& scores, int frames) {
  const double T = static_cast<double>(frames);
  double total_sq = 0.0;
  for (const auto& s : scores)
    for (double v : s) total_sq += v * v;

  SinusoidFit best;
  if (total_sq < 1e-18) return best;  // dead component: amplitude 0, frequency 1

  double best_sse = std::numeric_limits<double>::infinity();
  double best_f = 1.0;

  auto sse_at = [&](double f, double* amp_out = nullptr, double* phase_out = nullptr,
                    double* offset_out = nullptr) {
    double w = 2.0 * std::numbers::pi * f / T;
    double ss = 0.0, cc = 0.0, sc = 0.0, s1 = 0.0, c1 = 0.0;
    for (int t = 0; t < frames; ++t) {
      double s = std::sin(w * t), c = std::cos(w * t);
      ss += s * s;
      cc += c * c;
      sc += s * c;
      s1 += s;
      c1 += c;
    }
    double ns = static_cast<double>(scores.size());
    ss *= ns;
    cc *= ns;
    sc *= ns;
    s1 *= ns;
    c1 *= ns;
    double n = ns * static_cast<double>(frames);
    double b1 = 0.0, b2 = 0.0, b0 = 0.0;
    for (const auto& series : scores)
      for (int t = 0; t < frames; ++t) {
        double v = series[static_cast<std::size_t>(t)];
        b1 += v * std::sin(w * t);
        b2 += v * std::cos(w * t);
        b0 += v;
      }
    Eigen::Matrix3d normal;
    normal << ss, sc, s1, sc, cc, c1, s1, c1, n;
    if (std::abs(normal.determinant()) < 1e-9) return total_sq;
    Eigen::Vector3d rhs(b1, b2, b0);
    Eigen::Vector3d sol = normal.ldlt().solve(rhs);
    double A = sol[0], B = sol[1], d = sol[2];
    if (amp_out) *amp_out = std::hypot(A, B);
    if (phase_out) *phase_out = std::atan2(B, A);
    if (offset_out) *offset_out = d;
    return total_sq - (A * b1 + B * b2 + d * b0);
  };

  for (double f = 0.25; f <= 4.0 + 1e-9; f += 0.01) {
    double sse = sse_at(f);
    if (sse < best_sse) {
      best_sse = sse;
      best_f = f;
    }
  }

  // Golden-section refinement around the grid winner.
  double lo = std::max(0.25, best_f - 0.01), hi = std::min(4.0, best_f + 0.01);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = sse_at(x1), f2 = sse_at(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = sse_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = sse_at(x2);
    }
  }
  double f_refined = 0.5 * (lo + hi);
  if (sse_at(f_refined) > best_sse) f_refined = best_f;

  SinusoidFit fit;
  fit.frequency = f_refined;
  sse_at(f_refined, &fit.amplitude, &fit.phase, &fit.offset);
  if (fit.amplitude < 0.0) fit.amplitude = 0.0;
  return fit;
}

}  // namespace detail

// Fits the subject model on all frames of all samples (each 100 frames):
// pooled mean pose, eigenpostures of the frame-wise deviations, and a
// least-squares sinusoid per eigenposture score.
inline SinusoidGaitModel fit_sinusoid_model(std::span<const GaitSample> samples) {
  if (samples.empty()) raise(Errc::degenerate_data, "no samples to fit");
  const int frames = static_cast<int>(samples.front().frame_count());
  for (const auto& s : samples)
    if (static_cast<int>(s.frame_count()) != frames)
      raise(Errc::invalid_composition, "sinusoid model requires equal frame counts per sample");
  if (frames < 4) raise(Errc::too_few_frames, "sinusoid model needs at least 4 frames");

  const Eigen::Index dim = 3 * static_cast<Eigen::Index>(samples.front().marker_count());
  const Eigen::Index rows = static_cast<Eigen::Index>(samples.size()) * frames;
  Eigen::MatrixXd pooled(rows, dim);
  Eigen::Index r = 0;
  for (const auto& s : samples)
    for (const auto& frame : s.frames) pooled.row(r++) = detail::pose_to_vector(frame).transpose();

  SinusoidGaitModel model;
  model.frames = frames;
  model.mean_pose = pooled.colwise().mean();

  Eigen::MatrixXd centered = pooled.rowwise() - model.mean_pose.transpose();
  if (centered.squaredNorm() / static_cast<double>(rows) < 1e-16)
    raise(Errc::degenerate_data, "pose variance is zero; nothing to fit");

  PCAModel pca = fit_pca(pooled, 1.0, 4);
  model.components = pad_orthonormal(pca.components, 4);

  // Scores are projections onto each eigenposture, centered on the pooled
  // mean. Each component's DC intercept is a constant pose offset along that
  // (orthonormal) direction, so it folds back into the mean pose without
  // touching the other components' scores.
  Eigen::VectorXd mean_correction = Eigen::VectorXd::Zero(dim);
  for (int comp = 0; comp < 4; ++comp) {
    std::vector<std::vector<double>> scores;
    scores.reserve(samples.size());
    for (const auto& s : samples) {
      std::vector<double> series(static_cast<std::size_t>(frames));
      for (int t = 0; t < frames; ++t) {
        Eigen::VectorXd dev = detail::pose_to_vector(s.frames[static_cast<std::size_t>(t)]) -
                              model.mean_pose;
        series[static_cast<std::size_t>(t)] = dev.dot(model.components.col(comp));
      }
      scores.push_back(std::move(series));
    }
    detail::SinusoidFit fit = detail::fit_score_sinusoid(scores, frames);
    model.amplitude[static_cast<std::size_t>(comp)] = fit.amplitude;
    model.frequency[static_cast<std::size_t>(comp)] = fit.frequency;
    model.phase[static_cast<std::size_t>(comp)] = fit.phase;
    mean_correction += fit.offset * model.components.col(comp);
  }
  model.mean_pose += mean_correction;

  // Reconstruction residual over every channel of every frame.
  double sq_sum = 0.0;
  long count = 0;
  for (const auto& s : samples)
    for (int t = 0; t < frames; ++t) {
      Eigen::VectorXd rec = model.mean_pose;
      for (int comp = 0; comp < 4; ++comp) {
        double w = 2.0 * std::numbers::pi * model.frequency[static_cast<std::size_t>(comp)] /
                   static_cast<double>(frames);
        rec += model.amplitude[static_cast<std::size_t>(comp)] *
               std::sin(w * t + model.phase[static_cast<std::size_t>(comp)]) *
               model.components.col(comp);
      }
      Eigen::VectorXd actual = detail::pose_to_vector(s.frames[static_cast<std::size_t>(t)]);
      sq_sum += (actual - rec).squaredNorm();
      count += dim;
    }
  model.residual_rms = std::sqrt(sq_sum / static_cast<double>(count));
  return model;
}

// Synthesizes one sample from the model: mean pose plus the four fitted
// sinusoid components.
inline GaitSample resynthesize(const SinusoidGaitModel& model, const std::string& subject_id,
                               const std::string& sample_id) {
  GaitSample out;
  out.subject_id = subject_id;
  out.sample_id = sample_id;
  out.frame_rate_hz = static_cast<double>(model.frames);
  out.frames.reserve(static_cast<std::size_t>(model.frames));
  for (int t = 0; t < model.frames; ++t) {
    Eigen::VectorXd v = model.mean_pose;
    for (int comp = 0; comp < 4; ++comp) {
      double w = 2.0 * std::numbers::pi * model.frequency[static_cast<std::size_t>(comp)] /
                 static_cast<double>(model.frames);
      v += model.amplitude[static_cast<std::size_t>(comp)] *
           std::sin(w * t + model.phase[static_cast<std::size_t>(comp)]) *
           model.components.col(comp);
    }
    out.frames.push_back(detail::vector_to_pose(v));
  }
  return out;
}

enum class EqualizeTarget { amplitude, frequency };

// Replaces each subject's per-component amplitude (or frequency) with the
// cross-subject mean at that variance rank, then resynthesizes every sample
// from its subject model.
inline Dataset equalize(const Dataset& dataset, EqualizeTarget target) {
  if (dataset.subjects.empty()) raise(Errc::degenerate_data, "empty dataset");
  std::vector<SinusoidGaitModel> models;
  models.reserve(dataset.subjects.size());
  for (const auto& subj : dataset.subjects) {
    if (subj.samples.empty())
      raise(Errc::degenerate_data, "subject '" + subj.subject_id + "' has no samples");
    models.push_back(fit_sinusoid_model(std::span<const GaitSample>(subj.samples)));
  }

  std::array<double, 4> group_mean{};
  for (const auto& m : models)
    for (int c = 0; c < 4; ++c)
      group_mean[static_cast<std::size_t>(c)] +=
          target == EqualizeTarget::amplitude ? m.amplitude[static_cast<std::size_t>(c)]
                                              : m.frequency[static_cast<std::size_t>(c)];
  for (auto& v : group_mean) v /= static_cast<double>(models.size());

  Dataset out;
  out.layout = dataset.layout;
  out.body_parts = dataset.body_parts;
  out.subjects.reserve(dataset.subjects.size());
  for (std::size_t i = 0; i < dataset.subjects.size(); ++i) {
    SinusoidGaitModel m = models[i];
    for (int c = 0; c < 4; ++c) {
      if (target == EqualizeTarget::amplitude)
        m.amplitude[static_cast<std::size_t>(c)] = group_mean[static_cast<std::size_t>(c)];
      else
        m.frequency[static_cast<std::size_t>(c)] = group_mean[static_cast<std::size_t>(c)];
    }
    Subject subj;
    subj.subject_id = dataset.subjects[i].subject_id;
    subj.sex = dataset.subjects[i].sex;
    for (const auto& sample : dataset.subjects[i].samples)
      subj.samples.push_back(resynthesize(m, sample.subject_id, sample.sample_id));
    out.subjects.push_back(std::move(subj));
  }
  return out;
}

// Dataset-scoped pipeline application: equalize steps consume the whole
// dataset, frame-local steps map over samples.
inline Dataset apply_pipeline(const Dataset& dataset, const Pipeline& pipeline) {
  pipeline.validate();
  Dataset cur = dataset;
  for (const auto& spec : pipeline.steps) {
    if (spec.kind == PerturbKind::equalize_amplitude ||
        spec.kind == PerturbKind::equalize_frequency) {
      cur = equalize(cur, spec.kind == PerturbKind::equalize_amplitude
                              ? EqualizeTarget::amplitude
                              : EqualizeTarget::frequency);
      continue;
    }
    for (auto& subj : cur.subjects)
      for (auto& sample : subj.samples) sample = apply_step(sample, spec, cur.body_parts);
  }
  return cur;
}

}  // namespace gaitmask
