#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gaitmask/errors.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

struct FrameInterval {
  long start = 0;  // inclusive, motion-capture frames
  long end = 0;    // exclusive

  long length() const { return end - start; }
};

namespace detail {

// Debounced upward threshold crossings: force must come from below the
// threshold and stay at or above it for `debounce` consecutive samples.
inline std::vector<long> threshold_crossings(const std::vector<double>& f, double threshold,
                                             int debounce) {
  std::vector<long> out;
  const long n = static_cast<long>(f.size());
  for (long i = 1; i < n; ++i) {
    if (!(f[i - 1] < threshold) || !(f[i] >= threshold)) continue;
    if (i + debounce > n) break;
    bool sustained = true;
    for (long k = i; k < i + debounce; ++k) {
      if (!(f[k] >= threshold)) {
        sustained = false;
        break;
      }
    }
    if (sustained) out.push_back(i);
  }
  return out;
}

}  // namespace detail

// Locates one full gait cycle from the vertical ground-reaction forces: first
// debounced 20N contact on plate 1 to the next contact of that same plate,
// converted to motion-capture frame indices. With single-plate data (empty
// plate 2) the same rule applies; the two-plate protocol differs only in that
// plate 2 is validated for rate consistency.
inline FrameInterval segment_stride(const ForceSeries& plate1, const ForceSeries& plate2,
                                    double mocap_rate_hz, double threshold_n = 20.0,
                                    int debounce_samples = 10) {
  if (threshold_n <= 0.0) raise(Errc::invalid_params, "force threshold must be positive");
  if (mocap_rate_hz <= 0.0 || plate1.rate_hz <= 0.0)
    raise(Errc::rate_mismatch, "rates must be positive");
  double ratio_f = plate1.rate_hz / mocap_rate_hz;
  long ratio = static_cast<long>(std::llround(ratio_f));
  if (ratio < 1 || std::abs(ratio_f - static_cast<double>(ratio)) > 1e-9)
    raise(Errc::rate_mismatch,
          "force rate " + std::to_string(plate1.rate_hz) + " is not an integer multiple of mocap rate " +
              std::to_string(mocap_rate_hz));
  if (!plate2.newtons.empty() && plate2.rate_hz != plate1.rate_hz)
    raise(Errc::rate_mismatch, "force plates disagree on sampling rate");

  auto contacts = detail::threshold_crossings(plate1.newtons, threshold_n, debounce_samples);
  if (contacts.empty())
    raise(Errc::no_stride_found, "plate 1 never crosses the " + std::to_string(threshold_n) +
                                     "N threshold");
  if (contacts.size() < 2)
    raise(Errc::incomplete_stride, "no second same-foot contact on plate 1");

  FrameInterval iv;
  iv.start = contacts[0] / ratio;
  iv.end = contacts[1] / ratio;
  if (iv.end <= iv.start)
    raise(Errc::incomplete_stride, "stride spans less than one motion-capture frame");
  return iv;
}

}  // namespace gaitmask
