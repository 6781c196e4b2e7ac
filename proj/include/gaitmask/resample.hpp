#pragma once

#include <cstddef>
#include <string>

#include "gaitmask/errors.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

// Per-marker, per-axis linear interpolation onto `target_frames` equally
// spaced points over [0, T-1]. Endpoints are reproduced exactly; interior
// values stay within the input channel's min/max envelope.
inline GaitSample time_normalize(const GaitSample& sample, int target_frames = 100) {
  const std::size_t t_in = sample.frame_count();
  if (t_in < 2)
    raise(Errc::too_few_frames,
          "time_normalize needs at least 2 frames, got " + std::to_string(t_in));
  if (target_frames < 2)
    raise(Errc::too_few_frames, "target frame count must be at least 2");

  GaitSample out;
  out.subject_id = sample.subject_id;
  out.sample_id = sample.sample_id;
  out.frame_rate_hz = static_cast<double>(target_frames);  // frames per stride once normalized
  out.frames.resize(static_cast<std::size_t>(target_frames));

  const std::size_t m = sample.marker_count();
  const double span = static_cast<double>(t_in - 1);
  const double denom = static_cast<double>(target_frames - 1);
  for (int k = 0; k < target_frames; ++k) {
    double pos = static_cast<double>(k) * span / denom;
    std::size_t i0 = static_cast<std::size_t>(pos);
    if (i0 >= t_in - 1) i0 = t_in - 2;
    double frac = pos - static_cast<double>(i0);
    const Pose& a = sample.frames[i0];
    const Pose& b = sample.frames[i0 + 1];
    Pose& dst = out.frames[static_cast<std::size_t>(k)];
    dst.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      dst[j].x = (1.0 - frac) * a[j].x + frac * b[j].x;
      dst[j].y = (1.0 - frac) * a[j].y + frac * b[j].y;
      dst[j].z = (1.0 - frac) * a[j].z + frac * b[j].z;
    }
  }
  return out;
}

}  // namespace gaitmask
