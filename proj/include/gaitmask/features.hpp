#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gaitmask/errors.hpp"
#include "gaitmask/io.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

enum class Encoding { flatten, reduced_angles };

inline const char* encoding_name(Encoding e) {
  return e == Encoding::flatten ? "flatten" : "reduced_angles";
}

inline Encoding encoding_from_name(const std::string& name) {
  if (name == "flatten") return Encoding::flatten;
  if (name == "reduced_angles") return Encoding::reduced_angles;
  raise(Errc::invalid_params, "unknown encoding '" + name + "'");
}

struct FeatureVector {
  std::vector<double> values;
  Encoding encoding = Encoding::flatten;
  std::string subject_id;
  std::string sample_id;
  int degenerate_segments = 0;  // reduced_angles only: zero-length segment count
};

// Frame-major concatenation of all poses: length T * M * 3, ordering
// (frame, marker-in-layout-order, x/y/z).
inline FeatureVector flatten(const GaitSample& sample) {
  FeatureVector fv;
  fv.encoding = Encoding::flatten;
  fv.subject_id = sample.subject_id;
  fv.sample_id = sample.sample_id;
  fv.values.reserve(sample.frame_count() * sample.marker_count() * 3);
  for (const auto& frame : sample.frames)
    for (const auto& p : frame) {
      fv.values.push_back(p.x);
      fv.values.push_back(p.y);
      fv.values.push_back(p.z);
    }
  return fv;
}

// 17-role reduction: each reduced marker is the centroid of its mapped source
// markers, frame by frame. Output marker order follows ReducedRole.
inline GaitSample reduce_markers(const GaitSample& sample, const BodyPartMap& map) {
  for (int r = 0; r < kReducedRoleCount; ++r)
    if (map.reduction[r].empty())
      raise(Errc::incomplete_reduction_map,
            std::string("role '") + reduced_role_name(static_cast<ReducedRole>(r)) +
                "' has no source markers");
  GaitSample out;
  out.subject_id = sample.subject_id;
  out.sample_id = sample.sample_id;
  out.frame_rate_hz = sample.frame_rate_hz;
  out.frames.resize(sample.frame_count());
  for (std::size_t t = 0; t < sample.frame_count(); ++t) {
    const Pose& src = sample.frames[t];
    Pose& dst = out.frames[t];
    dst.resize(kReducedRoleCount);
    for (int r = 0; r < kReducedRoleCount; ++r) {
      Vec3 acc{};
      for (int idx : map.reduction[r]) {
        if (idx < 0 || idx >= static_cast<int>(src.size()))
          raise(Errc::unknown_marker, "reduction index out of range for sample");
        acc = acc + src[static_cast<std::size_t>(idx)];
      }
      dst[static_cast<std::size_t>(r)] =
          (1.0 / static_cast<double>(map.reduction[r].size())) * acc;
    }
  }
  return out;
}

namespace detail {

// Interior joint angle from segment directions u = J - parent, v = child - J:
// arccos(-u.v) so an anatomically straight limb reads pi. Segments shorter
// than 1e-9 mm (masked body parts) yield 0 and raise the degeneracy count.
inline double interior_angle(const Vec3& parent, const Vec3& joint, const Vec3& child,
                             int& degenerate) {
  Vec3 u = joint - parent;
  Vec3 v = child - joint;
  double nu = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  double nv = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  if (nu < 1e-9 || nv < 1e-9) {
    ++degenerate;
    return 0.0;
  }
  double dot = (u.x * v.x + u.y * v.y + u.z * v.z) / (nu * nv);
  if (dot > 1.0) dot = 1.0;
  if (dot < -1.0) dot = -1.0;
  return std::acos(-dot);
}

}  // namespace detail

// Ten interior angles per frame on the 17-role skeleton, frame-major:
// L/R shoulder (neck-shoulder-elbow), L/R elbow (shoulder-elbow-wrist),
// L/R hip (torso-hip-knee), L/R knee (hip-knee-ankle), L/R ankle
// (knee-ankle-toe).
inline FeatureVector joint_angles(const GaitSample& reduced) {
  if (reduced.marker_count() != kReducedRoleCount)
    raise(Errc::incomplete_reduction_map,
          "joint_angles expects a 17-marker sample, got " + std::to_string(reduced.marker_count()));

  struct Chain {
    ReducedRole parent, joint, child;
  };
  static constexpr Chain kChains[10] = {
      {ReducedRole::neck, ReducedRole::l_shoulder, ReducedRole::l_elbow},
      {ReducedRole::neck, ReducedRole::r_shoulder, ReducedRole::r_elbow},
      {ReducedRole::l_shoulder, ReducedRole::l_elbow, ReducedRole::l_wrist},
      {ReducedRole::r_shoulder, ReducedRole::r_elbow, ReducedRole::r_wrist},
      {ReducedRole::torso, ReducedRole::l_hip, ReducedRole::l_knee},
      {ReducedRole::torso, ReducedRole::r_hip, ReducedRole::r_knee},
      {ReducedRole::l_hip, ReducedRole::l_knee, ReducedRole::l_ankle},
      {ReducedRole::r_hip, ReducedRole::r_knee, ReducedRole::r_ankle},
      {ReducedRole::l_knee, ReducedRole::l_ankle, ReducedRole::l_toe},
      {ReducedRole::r_knee, ReducedRole::r_ankle, ReducedRole::r_toe},
  };

  FeatureVector fv;
  fv.encoding = Encoding::reduced_angles;
  fv.subject_id = reduced.subject_id;
  fv.sample_id = reduced.sample_id;
  fv.values.reserve(reduced.frame_count() * 10);
  for (const auto& frame : reduced.frames) {
    for (const auto& chain : kChains) {
      fv.values.push_back(detail::interior_angle(frame[static_cast<std::size_t>(chain.parent)],
                                                 frame[static_cast<std::size_t>(chain.joint)],
                                                 frame[static_cast<std::size_t>(chain.child)],
                                                 fv.degenerate_segments));
    }
  }
  return fv;
}

inline FeatureVector encode_sample(const GaitSample& sample, Encoding encoding,
                                   const BodyPartMap& map) {
  if (encoding == Encoding::flatten) return flatten(sample);
  return joint_angles(reduce_markers(sample, map));
}

struct FeatureMatrix {
  Eigen::MatrixXd X;  // rows = samples
  Encoding encoding = Encoding::flatten;
  std::vector<std::pair<std::string, std::string>> provenance;  // (subject, sample) per row
  long degenerate_segments = 0;
};

inline FeatureMatrix encode_samples(const std::vector<const GaitSample*>& samples,
                                    Encoding encoding, const BodyPartMap& map) {
  FeatureMatrix fm;
  fm.encoding = encoding;
  Eigen::Index row = 0;
  for (const GaitSample* s : samples) {
    FeatureVector fv = encode_sample(*s, encoding, map);
    if (row == 0)
      fm.X.resize(static_cast<Eigen::Index>(samples.size()),
                  static_cast<Eigen::Index>(fv.values.size()));
    if (static_cast<Eigen::Index>(fv.values.size()) != fm.X.cols())
      raise(Errc::length_mismatch, "feature length differs between samples of one condition");
    for (std::size_t j = 0; j < fv.values.size(); ++j)
      fm.X(row, static_cast<Eigen::Index>(j)) = fv.values[j];
    fm.provenance.emplace_back(fv.subject_id, fv.sample_id);
    fm.degenerate_segments += fv.degenerate_segments;
    ++row;
  }
  return fm;
}

inline FeatureMatrix encode_samples(const std::vector<GaitSample>& samples, Encoding encoding,
                                    const BodyPartMap& map) {
  std::vector<const GaitSample*> refs;
  refs.reserve(samples.size());
  for (const auto& s : samples) refs.push_back(&s);
  return encode_samples(refs, encoding, map);
}

// Feature CSV (rows = samples, columns = features) plus a sidecar manifest
// naming the encoding, pipeline, and dimensions.
inline void write_feature_csv(const fs::path& csv_path, const FeatureMatrix& fm,
                              const std::string& pipeline_text) {
  std::string out = "subject_id,sample_id";
  for (Eigen::Index j = 0; j < fm.X.cols(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (Eigen::Index r = 0; r < fm.X.rows(); ++r) {
    out += fm.provenance[static_cast<std::size_t>(r)].first;
    out += ',';
    out += fm.provenance[static_cast<std::size_t>(r)].second;
    for (Eigen::Index j = 0; j < fm.X.cols(); ++j) {
      out += ',';
      append_double(out, fm.X(r, j));
    }
    out += '\n';
  }
  write_text_file(csv_path, out);

  json manifest;
  manifest["encoding"] = encoding_name(fm.encoding);
  manifest["pipeline"] = pipeline_text;
  manifest["rows"] = fm.X.rows();
  manifest["columns"] = fm.X.cols();
  manifest["degenerate_segments"] = fm.degenerate_segments;
  write_text_file(csv_path.string() + ".manifest.json", manifest.dump(2) + "\n");
}

}  // namespace gaitmask
