#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaitmask/errors.hpp"

namespace gaitmask {

// Lab coordinates in millimeters. Convention: x = walking direction,
// y = vertical (height), z = lateral.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& axis(int a) { return a == 0 ? x : (a == 1 ? y : z); }
  double axis(int a) const { return a == 0 ? x : (a == 1 ? y : z); }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

// One recorded pose: ordered marker positions matching the dataset layout.
using Pose = std::vector<Vec3>;

struct GaitSample {
  std::string subject_id;
  std::string sample_id;
  std::vector<Pose> frames;
  double frame_rate_hz = 0.0;  // 250 for raw capture; target frame count after time normalization

  std::size_t frame_count() const { return frames.size(); }
  std::size_t marker_count() const { return frames.empty() ? 0 : frames.front().size(); }
};

struct ForceSeries {
  std::vector<double> newtons;  // vertical ground reaction force
  double rate_hz = 0.0;
  std::string plate_id;
};

enum class Sex { female, male };

inline const char* sex_code(Sex s) { return s == Sex::female ? "F" : "M"; }

inline Sex sex_from_code(const std::string& code) {
  if (code == "F" || code == "f" || code == "female") return Sex::female;
  if (code == "M" || code == "m" || code == "male") return Sex::male;
  raise(Errc::missing_metadata, "unrecognized sex code '" + code + "'");
}

struct Subject {
  std::string subject_id;
  Sex sex = Sex::female;
  std::vector<GaitSample> samples;
};

struct MarkerLayout {
  std::vector<std::string> marker_names;  // canonical serialization order

  std::size_t marker_count() const { return marker_names.size(); }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < marker_names.size(); ++i)
      if (marker_names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

enum class BodyPart { head, torso, hip, arms, legs };
inline constexpr int kBodyPartCount = 5;

inline const char* body_part_name(BodyPart p) {
  switch (p) {
    case BodyPart::head: return "head";
    case BodyPart::torso: return "torso";
    case BodyPart::hip: return "hip";
    case BodyPart::arms: return "arms";
    case BodyPart::legs: return "legs";
  }
  return "?";
}

inline BodyPart body_part_from_name(const std::string& name) {
  for (int i = 0; i < kBodyPartCount; ++i) {
    auto p = static_cast<BodyPart>(i);
    if (name == body_part_name(p)) return p;
  }
  raise(Errc::unknown_part, "unknown body part '" + name + "'");
}

// The 17 reduced marker roles, in canonical output order.
enum class ReducedRole {
  head, neck, torso,
  l_shoulder, r_shoulder, l_elbow, r_elbow, l_wrist, r_wrist,
  l_hip, r_hip, l_knee, r_knee, l_ankle, r_ankle, l_toe, r_toe,
};
inline constexpr int kReducedRoleCount = 17;

inline const char* reduced_role_name(ReducedRole r) {
  static constexpr const char* names[kReducedRoleCount] = {
      "head", "neck", "torso",
      "l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_wrist", "r_wrist",
      "l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle", "l_toe", "r_toe"};
  return names[static_cast<int>(r)];
}

// Marker-index-based view of the layout file's group assignments and the
// 17-role reduction map; built against one MarkerLayout.
struct BodyPartMap {
  std::vector<BodyPart> group_of;                            // one entry per layout marker
  std::array<std::vector<int>, kReducedRoleCount> reduction;  // role -> source marker indices

  void validate(const MarkerLayout& layout) const {
    if (group_of.size() != layout.marker_count())
      raise(Errc::unknown_marker, "group map does not cover every layout marker");
    for (int r = 0; r < kReducedRoleCount; ++r) {
      if (reduction[r].empty())
        raise(Errc::incomplete_reduction_map,
              std::string("role '") + reduced_role_name(static_cast<ReducedRole>(r)) +
                  "' has no source markers");
      for (int idx : reduction[r])
        if (idx < 0 || idx >= static_cast<int>(layout.marker_count()))
          raise(Errc::unknown_marker, "reduction map references marker index out of range");
    }
  }
};

struct Dataset {
  std::vector<Subject> subjects;
  MarkerLayout layout;
  BodyPartMap body_parts;

  std::size_t total_samples() const {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.samples.size();
    return n;
  }

  const Subject* find_subject(const std::string& id) const {
    for (const auto& s : subjects)
      if (s.subject_id == id) return &s;
    return nullptr;
  }
};

}  // namespace gaitmask
