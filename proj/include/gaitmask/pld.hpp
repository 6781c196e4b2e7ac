#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "gaitmask/defaults.hpp"
#include "gaitmask/io.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

// Orthographic point-light projection: rotate about the vertical (y) axis by
// the azimuth, then drop depth. Azimuth 0 keeps the lab x axis; the default
// 45 degrees matches the side-rotated rendering view.
inline void export_pld(const GaitSample& sample, const fs::path& out_path,
                       double azimuth_deg = defaults::kPldAzimuthDeg) {
  double a = azimuth_deg * std::numbers::pi / 180.0;
  double ca = std::cos(a), sa = std::sin(a);
  std::string out = "frame,marker,u,v\n";
  for (std::size_t t = 0; t < sample.frame_count(); ++t) {
    for (std::size_t j = 0; j < sample.frames[t].size(); ++j) {
      const Vec3& p = sample.frames[t][j];
      double u = ca * p.x + sa * p.z;
      double v = p.y;
      out += std::to_string(t);
      out += ',';
      out += std::to_string(j);
      out += ',';
      append_double(out, u);
      out += ',';
      append_double(out, v);
      out += '\n';
    }
  }
  write_text_file(out_path, out);
}

}  // namespace gaitmask
