#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaitmask/errors.hpp"
#include "gaitmask/rng.hpp"
#include "gaitmask/sinusoid.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask::synth {

// ---------------------------------------------------------------------------
// 62-marker layout used by the synthetic walkers, mirroring a full-body
// optical marker set: 4 head, 11 torso, 5 hip, 18 arm, 24 leg markers.
// ---------------------------------------------------------------------------

inline const std::vector<std::pair<const char*, BodyPart>>& marker_table() {
  static const std::vector<std::pair<const char*, BodyPart>> table = {
      {"LFHD", BodyPart::head}, {"RFHD", BodyPart::head},
      {"LBHD", BodyPart::head}, {"RBHD", BodyPart::head},
      {"C7", BodyPart::torso},  {"T6", BodyPart::torso},   {"T10", BodyPart::torso},
      {"L1", BodyPart::torso},  {"CLAV", BodyPart::torso}, {"STRN", BodyPart::torso},
      {"RBAK", BodyPart::torso},
      {"LSCAP", BodyPart::torso}, {"RSCAP", BodyPart::torso},
      {"LPEC", BodyPart::torso},  {"RPEC", BodyPart::torso},
      {"LASI", BodyPart::hip}, {"RASI", BodyPart::hip},
      {"LPSI", BodyPart::hip}, {"RPSI", BodyPart::hip}, {"SACR", BodyPart::hip},
      {"LSHO", BodyPart::arms}, {"LUPA", BodyPart::arms}, {"LUPB", BodyPart::arms},
      {"LELB", BodyPart::arms}, {"LFRM", BodyPart::arms}, {"LWRA", BodyPart::arms},
      {"LWRB", BodyPart::arms}, {"LFIN", BodyPart::arms}, {"LTHB", BodyPart::arms},
      {"RSHO", BodyPart::arms}, {"RUPA", BodyPart::arms}, {"RUPB", BodyPart::arms},
      {"RELB", BodyPart::arms}, {"RFRM", BodyPart::arms}, {"RWRA", BodyPart::arms},
      {"RWRB", BodyPart::arms}, {"RFIN", BodyPart::arms}, {"RTHB", BodyPart::arms},
      {"LTHI", BodyPart::legs}, {"LTHIB", BodyPart::legs}, {"LKNE", BodyPart::legs},
      {"LKNEM", BodyPart::legs}, {"LTIB", BodyPart::legs}, {"LTIBB", BodyPart::legs},
      {"LANK", BodyPart::legs}, {"LANKM", BodyPart::legs}, {"LHEE", BodyPart::legs},
      {"LTOE", BodyPart::legs}, {"LMT1", BodyPart::legs}, {"LMT5", BodyPart::legs},
      {"RTHI", BodyPart::legs}, {"RTHIB", BodyPart::legs}, {"RKNE", BodyPart::legs},
      {"RKNEM", BodyPart::legs}, {"RTIB", BodyPart::legs}, {"RTIBB", BodyPart::legs},
      {"RANK", BodyPart::legs}, {"RANKM", BodyPart::legs}, {"RHEE", BodyPart::legs},
      {"RTOE", BodyPart::legs}, {"RMT1", BodyPart::legs}, {"RMT5", BodyPart::legs},
  };
  return table;
}

inline MarkerLayout synthetic_layout() {
  MarkerLayout layout;
  for (const auto& [name, part] : marker_table()) layout.marker_names.emplace_back(name);
  return layout;
}

inline BodyPartMap synthetic_body_part_map(const MarkerLayout& layout) {
  BodyPartMap map;
  map.group_of.resize(layout.marker_count());
  for (std::size_t i = 0; i < marker_table().size(); ++i)
    map.group_of[i] = marker_table()[i].second;

  auto set_role = [&map, &layout](ReducedRole role, std::initializer_list<const char*> names) {
    for (const char* n : names) {
      int idx = layout.index_of(n);
      if (idx < 0) raise(Errc::unknown_marker, std::string("synthetic layout lacks ") + n);
      map.reduction[static_cast<int>(role)].push_back(idx);
    }
  };
  set_role(ReducedRole::head, {"LFHD", "RFHD", "LBHD", "RBHD"});
  set_role(ReducedRole::neck, {"C7", "CLAV"});
  set_role(ReducedRole::torso, {"STRN", "T6", "T10", "L1"});
  set_role(ReducedRole::l_shoulder, {"LSHO"});
  set_role(ReducedRole::r_shoulder, {"RSHO"});
  set_role(ReducedRole::l_elbow, {"LELB"});
  set_role(ReducedRole::r_elbow, {"RELB"});
  set_role(ReducedRole::l_wrist, {"LWRA", "LWRB"});
  set_role(ReducedRole::r_wrist, {"RWRA", "RWRB"});
  set_role(ReducedRole::l_hip, {"LASI", "LPSI"});
  set_role(ReducedRole::r_hip, {"RASI", "RPSI"});
  set_role(ReducedRole::l_knee, {"LKNE", "LKNEM"});
  set_role(ReducedRole::r_knee, {"RKNE", "RKNEM"});
  set_role(ReducedRole::l_ankle, {"LANK", "LANKM"});
  set_role(ReducedRole::r_ankle, {"RANK", "RANKM"});
  set_role(ReducedRole::l_toe, {"LTOE", "LMT1", "LMT5"});
  set_role(ReducedRole::r_toe, {"RTOE", "RMT1", "RMT5"});
  map.validate(layout);
  return map;
}

// ---------------------------------------------------------------------------
// Forward-kinematic sinusoidal walker: rigid segments, sagittal-plane joint
// sinusoids at the stride frequency, hip bob at the double frequency. Walks
// in place so every injected parameter stays recoverable from the pose data.
// ---------------------------------------------------------------------------

struct WalkerParams {
  Sex sex = Sex::female;
  double stature_mm = 1700.0;
  double hip_width_mm = 190.0;
  double shoulder_width_mm = 250.0;
  double stride_frequency = 1.0;  // cycles per (normalized) stride
  double hip_amplitude_rad = 0.48;
  double knee_amplitude_rad = 0.35;
  double knee_offset_rad = 0.25;
  double arm_amplitude_rad = 0.38;
  double elbow_offset_rad = 0.45;
  double elbow_amplitude_rad = 0.15;
  double foot_amplitude_rad = 0.12;
  double bob_amplitude_mm = 22.0;
  double sway_amplitude_mm = 18.0;
  double torso_pitch_rad = 0.06;
  double leg_phase = 0.0;
  double knee_phase_lag = 1.1;
  double foot_phase_lag = 2.0;
  double bob_phase = -0.4;
  double noise_mm = 2.0;  // per-sample additive marker noise

  void validate() const {
    if (stature_mm <= 0.0 || hip_width_mm <= 0.0 || shoulder_width_mm <= 0.0)
      raise(Errc::invalid_params, "segment lengths must be positive");
    if (stride_frequency <= 0.0) raise(Errc::invalid_params, "stride frequency must be positive");
    if (noise_mm < 0.0) raise(Errc::invalid_params, "noise scale must be non-negative");
  }
};

inline WalkerParams sample_walker_params(Rng& rng, Sex sex) {
  WalkerParams p;
  p.sex = sex;
  bool female = sex == Sex::female;
  p.stature_mm = rng.normal(female ? 1650.0 : 1780.0, 45.0);
  double hip_ratio = rng.normal(female ? 0.118 : 0.106, 0.005);
  double shoulder_ratio = rng.normal(female ? 1.22 : 1.45, 0.07);
  p.hip_width_mm = hip_ratio * p.stature_mm;
  p.shoulder_width_mm = shoulder_ratio * p.hip_width_mm;
  p.stride_frequency = std::clamp(rng.normal(1.0, 0.04), 0.85, 1.15);
  p.hip_amplitude_rad = rng.normal(0.48, 0.05);
  p.knee_amplitude_rad = rng.normal(0.35, 0.05);
  p.knee_offset_rad = rng.normal(0.25, 0.04);
  p.arm_amplitude_rad = rng.normal(female ? 0.34 : 0.40, 0.06);
  p.elbow_offset_rad = rng.normal(0.45, 0.08);
  p.elbow_amplitude_rad = rng.normal(0.15, 0.04);
  p.foot_amplitude_rad = rng.normal(0.12, 0.03);
  p.bob_amplitude_mm = rng.normal(22.0, 4.0);
  p.sway_amplitude_mm = rng.normal(female ? 22.0 : 15.0, 4.0);
  p.torso_pitch_rad = rng.normal(0.06, 0.02);
  p.leg_phase = rng.normal(0.0, 0.15);
  p.knee_phase_lag = rng.normal(1.1, 0.1);
  p.foot_phase_lag = rng.normal(2.0, 0.1);
  p.bob_phase = rng.normal(-0.4, 0.15);
  return p;
}

namespace detail {

// Marker on a segment hanging from `joint` at angle `theta` about the lateral
// axis: `along` follows the segment, `forward` its rotated normal, `lateral`
// the fixed z offset. Rigid by construction.
inline Vec3 on_limb(Vec3 joint, double theta, double along, double forward, double lateral) {
  double s = std::sin(theta), c = std::cos(theta);
  return {joint.x + along * s + forward * c, joint.y - along * c + forward * s,
          joint.z + lateral};
}

// Same for segments pointing up (torso, neck, head).
inline Vec3 on_trunk(Vec3 base, double pitch, double along, double forward, double lateral) {
  double s = std::sin(pitch), c = std::cos(pitch);
  return {base.x - along * s + forward * c, base.y + along * c + forward * s, base.z + lateral};
}

inline Vec3 on_foot(Vec3 ankle, double pitch, double forward, double up, double lateral) {
  double s = std::sin(pitch), c = std::cos(pitch);
  return {ankle.x + forward * c - up * s, ankle.y + forward * s + up * c, ankle.z + lateral};
}

}  // namespace detail

// One pose at stride phase `phase` (fraction of a stride, 0..1 over a
// normalized sample).
inline Pose walker_pose(const WalkerParams& p, double phase) {
  using std::numbers::pi;
  const double scale = p.stature_mm / 1700.0;
  const double hip_y = 0.53 * p.stature_mm;
  const double torso_len = 0.29 * p.stature_mm;
  const double neck_len = 0.05 * p.stature_mm;
  const double head_len = 0.11 * p.stature_mm;
  const double thigh = 0.245 * p.stature_mm;
  const double shank = 0.246 * p.stature_mm;
  const double foot = 0.152 * p.stature_mm;
  const double upper_arm = 0.188 * p.stature_mm;
  const double forearm = 0.145 * p.stature_mm;

  const double w = 2.0 * pi * p.stride_frequency;
  const double t = phase;  // in stride cycles
  const double th_hip_l = p.hip_amplitude_rad * std::sin(w * t + p.leg_phase);
  const double th_hip_r = p.hip_amplitude_rad * std::sin(w * t + p.leg_phase + pi);
  const double flex_knee_l =
      p.knee_offset_rad + p.knee_amplitude_rad * std::sin(w * t + p.leg_phase - p.knee_phase_lag);
  const double flex_knee_r = p.knee_offset_rad +
                             p.knee_amplitude_rad *
                                 std::sin(w * t + p.leg_phase + pi - p.knee_phase_lag);
  const double th_foot_l = p.foot_amplitude_rad * std::sin(w * t + p.leg_phase - p.foot_phase_lag);
  const double th_foot_r =
      p.foot_amplitude_rad * std::sin(w * t + p.leg_phase + pi - p.foot_phase_lag);
  const double th_arm_l = p.arm_amplitude_rad * std::sin(w * t + p.leg_phase + pi);
  const double th_arm_r = p.arm_amplitude_rad * std::sin(w * t + p.leg_phase);
  const double flex_elbow_l =
      p.elbow_offset_rad + p.elbow_amplitude_rad * std::sin(w * t + p.leg_phase + pi - 0.7);
  const double flex_elbow_r =
      p.elbow_offset_rad + p.elbow_amplitude_rad * std::sin(w * t + p.leg_phase - 0.7);

  Vec3 pelvis{0.0, hip_y + p.bob_amplitude_mm * std::sin(2.0 * w * t + p.bob_phase),
              p.sway_amplitude_mm * std::sin(w * t + p.leg_phase + 0.5 * pi)};
  const double hw = p.hip_width_mm, sw = p.shoulder_width_mm;
  Vec3 hip_l = pelvis + Vec3{0.0, 0.0, -hw / 2.0};
  Vec3 hip_r = pelvis + Vec3{0.0, 0.0, +hw / 2.0};
  auto limb_end = [](Vec3 joint, double theta, double len) {
    return Vec3{joint.x + len * std::sin(theta), joint.y - len * std::cos(theta), joint.z};
  };
  Vec3 knee_l = limb_end(hip_l, th_hip_l, thigh);
  Vec3 knee_r = limb_end(hip_r, th_hip_r, thigh);
  const double th_shank_l = th_hip_l - flex_knee_l;
  const double th_shank_r = th_hip_r - flex_knee_r;
  Vec3 ankle_l = limb_end(knee_l, th_shank_l, shank);
  Vec3 ankle_r = limb_end(knee_r, th_shank_r, shank);

  const double pitch = p.torso_pitch_rad;
  Vec3 neck = detail::on_trunk(pelvis, pitch, torso_len, 0.0, 0.0);
  Vec3 sho_l = detail::on_trunk(pelvis, pitch, 0.95 * torso_len, 10.0 * scale, -sw / 2.0);
  Vec3 sho_r = detail::on_trunk(pelvis, pitch, 0.95 * torso_len, 10.0 * scale, +sw / 2.0);
  Vec3 elb_l = limb_end(sho_l, th_arm_l, upper_arm);
  Vec3 elb_r = limb_end(sho_r, th_arm_r, upper_arm);
  const double th_farm_l = th_arm_l + flex_elbow_l;
  const double th_farm_r = th_arm_r + flex_elbow_r;

  auto L = [&](double v) { return v * scale; };
  Pose pose;
  pose.reserve(62);
  // head (rigid with the trunk)
  double head_base = torso_len + neck_len;
  pose.push_back(detail::on_trunk(pelvis, pitch, head_base + 0.75 * head_len, L(55), -L(35)));  // LFHD
  pose.push_back(detail::on_trunk(pelvis, pitch, head_base + 0.75 * head_len, L(55), +L(35)));  // RFHD
  pose.push_back(detail::on_trunk(pelvis, pitch, head_base + 0.70 * head_len, -L(55), -L(40))); // LBHD
  pose.push_back(detail::on_trunk(pelvis, pitch, head_base + 0.70 * head_len, -L(55), +L(40))); // RBHD
  // torso
  pose.push_back(detail::on_trunk(pelvis, pitch, torso_len, -L(50), 0.0));          // C7
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.72 * torso_len, -L(85), 0.0));   // T6
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.55 * torso_len, -L(90), 0.0));   // T10
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.35 * torso_len, -L(85), 0.0));   // L1
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.92 * torso_len, L(60), 0.0));    // CLAV
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.75 * torso_len, L(80), 0.0));    // STRN
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.80 * torso_len, -L(80), L(70))); // RBAK
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.85 * torso_len, -L(75), -L(65))); // LSCAP
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.85 * torso_len, -L(75), +L(65))); // RSCAP
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.80 * torso_len, L(70), -L(60)));  // LPEC
  pose.push_back(detail::on_trunk(pelvis, pitch, 0.80 * torso_len, L(70), +L(60)));  // RPEC
  // hip (rigid with the pelvis)
  pose.push_back(pelvis + Vec3{L(70), 0.0, -hw / 2.0});    // LASI
  pose.push_back(pelvis + Vec3{L(70), 0.0, +hw / 2.0});    // RASI
  pose.push_back(pelvis + Vec3{-L(80), L(20), -hw / 3.0}); // LPSI
  pose.push_back(pelvis + Vec3{-L(80), L(20), +hw / 3.0}); // RPSI
  pose.push_back(pelvis + Vec3{-L(95), L(30), 0.0});       // SACR
  // left arm
  pose.push_back(detail::on_limb(sho_l, th_arm_l, 0.05 * upper_arm, L(20), -L(35)));  // LSHO
  pose.push_back(detail::on_limb(sho_l, th_arm_l, 0.45 * upper_arm, L(25), -L(30)));  // LUPA
  pose.push_back(detail::on_limb(sho_l, th_arm_l, 0.60 * upper_arm, L(20), -L(32)));  // LUPB
  pose.push_back(detail::on_limb(sho_l, th_arm_l, upper_arm, 0.0, -L(40)));           // LELB
  pose.push_back(detail::on_limb(elb_l, th_farm_l, 0.50 * forearm, L(15), -L(25)));   // LFRM
  pose.push_back(detail::on_limb(elb_l, th_farm_l, forearm, L(10), -L(30)));          // LWRA
  pose.push_back(detail::on_limb(elb_l, th_farm_l, forearm, -L(10), -L(30)));         // LWRB
  pose.push_back(detail::on_limb(elb_l, th_farm_l, 1.25 * forearm, 0.0, -L(25)));     // LFIN
  pose.push_back(detail::on_limb(elb_l, th_farm_l, 1.12 * forearm, L(25), -L(15)));   // LTHB
  // right arm
  pose.push_back(detail::on_limb(sho_r, th_arm_r, 0.05 * upper_arm, L(20), +L(35)));  // RSHO
  pose.push_back(detail::on_limb(sho_r, th_arm_r, 0.45 * upper_arm, L(25), +L(30)));  // RUPA
  pose.push_back(detail::on_limb(sho_r, th_arm_r, 0.60 * upper_arm, L(20), +L(32)));  // RUPB
  pose.push_back(detail::on_limb(sho_r, th_arm_r, upper_arm, 0.0, +L(40)));           // RELB
  pose.push_back(detail::on_limb(elb_r, th_farm_r, 0.50 * forearm, L(15), +L(25)));   // RFRM
  pose.push_back(detail::on_limb(elb_r, th_farm_r, forearm, L(10), +L(30)));          // RWRA
  pose.push_back(detail::on_limb(elb_r, th_farm_r, forearm, -L(10), +L(30)));         // RWRB
  pose.push_back(detail::on_limb(elb_r, th_farm_r, 1.25 * forearm, 0.0, +L(25)));     // RFIN
  pose.push_back(detail::on_limb(elb_r, th_farm_r, 1.12 * forearm, L(25), +L(15)));   // RTHB
  // left leg
  pose.push_back(detail::on_limb(hip_l, th_hip_l, 0.50 * thigh, L(40), -L(20)));      // LTHI
  pose.push_back(detail::on_limb(hip_l, th_hip_l, 0.70 * thigh, L(35), -L(25)));      // LTHIB
  pose.push_back(detail::on_limb(hip_l, th_hip_l, thigh, 0.0, -L(55)));               // LKNE
  pose.push_back(detail::on_limb(hip_l, th_hip_l, thigh, 0.0, +L(55)));               // LKNEM
  pose.push_back(detail::on_limb(knee_l, th_shank_l, 0.40 * shank, L(35), -L(25)));   // LTIB
  pose.push_back(detail::on_limb(knee_l, th_shank_l, 0.65 * shank, L(30), -L(28)));   // LTIBB
  pose.push_back(detail::on_limb(knee_l, th_shank_l, shank, 0.0, -L(45)));            // LANK
  pose.push_back(detail::on_limb(knee_l, th_shank_l, shank, 0.0, +L(45)));            // LANKM
  pose.push_back(detail::on_foot(ankle_l, th_foot_l, -0.30 * foot, -L(55), -L(10)));  // LHEE
  pose.push_back(detail::on_foot(ankle_l, th_foot_l, 0.70 * foot, -L(70), 0.0));      // LTOE
  pose.push_back(detail::on_foot(ankle_l, th_foot_l, 0.55 * foot, -L(65), +L(25)));   // LMT1
  pose.push_back(detail::on_foot(ankle_l, th_foot_l, 0.50 * foot, -L(65), -L(35)));   // LMT5
  // right leg
  pose.push_back(detail::on_limb(hip_r, th_hip_r, 0.50 * thigh, L(40), +L(20)));      // RTHI
  pose.push_back(detail::on_limb(hip_r, th_hip_r, 0.70 * thigh, L(35), +L(25)));      // RTHIB
  pose.push_back(detail::on_limb(hip_r, th_hip_r, thigh, 0.0, +L(55)));               // RKNE
  pose.push_back(detail::on_limb(hip_r, th_hip_r, thigh, 0.0, -L(55)));               // RKNEM
  pose.push_back(detail::on_limb(knee_r, th_shank_r, 0.40 * shank, L(35), +L(25)));   // RTIB
  pose.push_back(detail::on_limb(knee_r, th_shank_r, 0.65 * shank, L(30), +L(28)));   // RTIBB
  pose.push_back(detail::on_limb(knee_r, th_shank_r, shank, 0.0, +L(45)));            // RANK
  pose.push_back(detail::on_limb(knee_r, th_shank_r, shank, 0.0, -L(45)));            // RANKM
  pose.push_back(detail::on_foot(ankle_r, th_foot_r, -0.30 * foot, -L(55), +L(10)));  // RHEE
  pose.push_back(detail::on_foot(ankle_r, th_foot_r, 0.70 * foot, -L(70), 0.0));      // RTOE
  pose.push_back(detail::on_foot(ankle_r, th_foot_r, 0.55 * foot, -L(65), -L(25)));   // RMT1
  pose.push_back(detail::on_foot(ankle_r, th_foot_r, 0.50 * foot, -L(65), +L(35)));   // RMT5
  return pose;
}

// Zero-noise normalized sample: `frames` poses over exactly one stride.
inline GaitSample render_walker(const WalkerParams& params, int frames,
                                const std::string& subject_id, const std::string& sample_id) {
  params.validate();
  GaitSample s;
  s.subject_id = subject_id;
  s.sample_id = sample_id;
  s.frame_rate_hz = static_cast<double>(frames);
  s.frames.reserve(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t)
    s.frames.push_back(walker_pose(params, static_cast<double>(t) / static_cast<double>(frames)));
  return s;
}

inline void add_marker_noise(GaitSample& sample, double noise_mm, Rng& rng) {
  if (noise_mm <= 0.0) return;
  for (auto& frame : sample.frames)
    for (auto& p : frame) {
      p.x += rng.normal(0.0, noise_mm);
      p.y += rng.normal(0.0, noise_mm);
      p.z += rng.normal(0.0, noise_mm);
    }
}

inline std::string subject_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%03d", i + 1);
  return buf;
}

inline std::string sample_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d", i + 1);
  return buf;
}

inline Dataset generate_dataset_from_params(const std::vector<WalkerParams>& subjects,
                                            int samples_per_subject, std::uint64_t seed,
                                            int frames = 100) {
  if (subjects.size() < 2 || samples_per_subject < 2)
    raise(Errc::invalid_params, "need at least 2 subjects and 2 samples per subject");
  Dataset ds;
  ds.layout = synthetic_layout();
  ds.body_parts = synthetic_body_part_map(ds.layout);
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    Subject subj;
    subj.subject_id = subject_name(static_cast<int>(i));
    subj.sex = subjects[i].sex;
    GaitSample base = render_walker(subjects[i], frames, subj.subject_id, "");
    for (int k = 0; k < samples_per_subject; ++k) {
      GaitSample s = base;
      s.sample_id = sample_name(k);
      Rng noise(derive_seed(seed, "sample-noise", i, static_cast<std::uint64_t>(k)));
      add_marker_noise(s, subjects[i].noise_mm, noise);
      subj.samples.push_back(std::move(s));
    }
    ds.subjects.push_back(std::move(subj));
  }
  return ds;
}

// Seeded walker population with sex-conditioned parameter means; alternating
// sex assignment keeps the classes balanced.
inline std::vector<WalkerParams> sample_population(int n_subjects, std::uint64_t seed,
                                                   double noise_mm = 2.0) {
  std::vector<WalkerParams> out;
  out.reserve(static_cast<std::size_t>(n_subjects));
  for (int i = 0; i < n_subjects; ++i) {
    Rng rng(derive_seed(seed, "subject-params", static_cast<std::uint64_t>(i)));
    WalkerParams p = sample_walker_params(rng, i % 2 == 0 ? Sex::female : Sex::male);
    p.noise_mm = noise_mm;
    out.push_back(p);
  }
  return out;
}

inline Dataset generate_dataset(int n_subjects, int samples_per_subject, std::uint64_t seed,
                                double noise_mm = 2.0, int frames = 100) {
  if (n_subjects < 2 || samples_per_subject < 2)
    raise(Errc::invalid_params, "need at least 2 subjects and 2 samples per subject");
  return generate_dataset_from_params(sample_population(n_subjects, seed, noise_mm),
                                      samples_per_subject, seed, frames);
}

// ---------------------------------------------------------------------------
// Raw-recording variant: un-normalized 250Hz frames spanning ~1.2 strides plus
// synthetic 1000Hz force plates whose stance bumps cross the 20N threshold
// once per stride. Exercises the ingest path end to end.
// ---------------------------------------------------------------------------

struct RawRecording {
  GaitSample sample;  // 250Hz, raw frame count
  ForceSeries plate1;
  ForceSeries plate2;
};

inline RawRecording render_walker_raw(const WalkerParams& params, const std::string& subject_id,
                                      const std::string& sample_id, std::uint64_t noise_seed,
                                      int raw_frames = 300, double mocap_rate = 250.0,
                                      double force_rate = 1000.0, int contact_frame = 30,
                                      int stride_frames = 250) {
  RawRecording rec;
  rec.sample.subject_id = subject_id;
  rec.sample.sample_id = sample_id;
  rec.sample.frame_rate_hz = mocap_rate;
  for (int t = 0; t < raw_frames; ++t) {
    double phase = static_cast<double>(t - contact_frame) / static_cast<double>(stride_frames);
    rec.sample.frames.push_back(walker_pose(params, phase));
  }
  Rng noise(derive_seed(noise_seed, "raw-noise"));
  add_marker_noise(rec.sample, params.noise_mm, noise);

  const double ratio = force_rate / mocap_rate;
  const long force_samples = static_cast<long>(raw_frames * ratio);
  const double stride_force_samples = stride_frames * ratio;
  const double contact_force_sample = contact_frame * ratio;
  auto stance_profile = [](double u) {
    // One stance bump covering 62% of the stride, peak 700N.
    if (u < 0.0 || u > 0.62) return 0.0;
    double s = std::sin(std::numbers::pi * u / 0.62);
    return 700.0 * s * s;
  };
  rec.plate1.rate_hz = force_rate;
  rec.plate1.plate_id = "plate1";
  rec.plate2.rate_hz = force_rate;
  rec.plate2.plate_id = "plate2";
  for (long s = 0; s < force_samples; ++s) {
    double phase = (static_cast<double>(s) - contact_force_sample) / stride_force_samples;
    double u1 = phase - std::floor(phase);
    double u2 = phase + 0.5 - std::floor(phase + 0.5);
    rec.plate1.newtons.push_back(phase < 0.0 && u1 > 0.62 ? 0.0 : stance_profile(u1));
    rec.plate2.newtons.push_back(stance_profile(u2));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Eigenposture-sinusoid fixture: samples built directly as
// mean + sum_i a_i sin(2 pi f_i t/T + phi_i) u_i with known ground truth.
// ---------------------------------------------------------------------------

struct SinusoidTruth {
  std::vector<double> amplitudes;   // mm, descending
  std::vector<double> frequencies;  // cycles per stride
  std::vector<double> phases;
};

struct SinusoidDatasetSpec {
  int n_subjects = 2;
  int samples_per_subject = 2;
  int components = 2;
  int frames = 100;
  std::uint64_t seed = 1;
  double noise_mm = 0.0;
  // Per-subject fundamental frequency; remaining components get distinct
  // slower/faster frequencies. Defaults to 1.0 for every subject.
  std::vector<double> fundamental_frequency;
};

inline std::pair<Dataset, std::vector<SinusoidTruth>> generate_sinusoid_dataset(
    const SinusoidDatasetSpec& spec) {
  if (spec.n_subjects < 1 || spec.samples_per_subject < 1 || spec.components < 1 ||
      spec.components > 4)
    raise(Errc::invalid_params, "invalid sinusoid dataset spec");
  Dataset ds;
  ds.layout = synthetic_layout();
  ds.body_parts = synthetic_body_part_map(ds.layout);
  const Eigen::Index dim = 3 * static_cast<Eigen::Index>(ds.layout.marker_count());

  WalkerParams base_params;
  Eigen::VectorXd mean = gaitmask::detail::pose_to_vector(walker_pose(base_params, 0.25));

  // Deterministic orthonormal directions shared by all subjects.
  Rng dir_rng(derive_seed(spec.seed, "sinusoid-directions"));
  Eigen::MatrixXd dirs(dim, spec.components);
  for (int c = 0; c < spec.components; ++c) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = dir_rng.normal();
    for (int prev = 0; prev < c; ++prev) v -= dirs.col(prev).dot(v) * dirs.col(prev);
    dirs.col(c) = v / v.norm();
  }

  std::vector<SinusoidTruth> truths;
  for (int i = 0; i < spec.n_subjects; ++i) {
    Rng rng(derive_seed(spec.seed, "sinusoid-subject", static_cast<std::uint64_t>(i)));
    SinusoidTruth truth;
    double f0 = i < static_cast<int>(spec.fundamental_frequency.size())
                    ? spec.fundamental_frequency[static_cast<std::size_t>(i)]
                    : 1.0;
    for (int c = 0; c < spec.components; ++c) {
      truth.amplitudes.push_back((40.0 - 9.0 * c) * rng.uniform(0.9, 1.1));
      truth.frequencies.push_back(c == 0 ? f0 : std::min(4.0, f0 * (c + 1.0)));
      truth.phases.push_back(rng.uniform(-1.0, 1.0));
    }
    Subject subj;
    subj.subject_id = subject_name(i);
    subj.sex = i % 2 == 0 ? Sex::female : Sex::male;
    for (int k = 0; k < spec.samples_per_subject; ++k) {
      GaitSample s;
      s.subject_id = subj.subject_id;
      s.sample_id = sample_name(k);
      s.frame_rate_hz = static_cast<double>(spec.frames);
      for (int t = 0; t < spec.frames; ++t) {
        Eigen::VectorXd v = mean;
        for (int c = 0; c < spec.components; ++c) {
          double wf = 2.0 * std::numbers::pi * truth.frequencies[static_cast<std::size_t>(c)] /
                      static_cast<double>(spec.frames);
          v += truth.amplitudes[static_cast<std::size_t>(c)] *
               std::sin(wf * t + truth.phases[static_cast<std::size_t>(c)]) * dirs.col(c);
        }
        s.frames.push_back(gaitmask::detail::vector_to_pose(v));
      }
      Rng noise(derive_seed(spec.seed, "sinusoid-noise", static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(k)));
      add_marker_noise(s, spec.noise_mm, noise);
      subj.samples.push_back(std::move(s));
    }
    ds.subjects.push_back(std::move(subj));
    truths.push_back(std::move(truth));
  }
  return {std::move(ds), std::move(truths)};
}

}  // namespace gaitmask::synth
