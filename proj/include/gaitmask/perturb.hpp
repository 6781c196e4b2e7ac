#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gaitmask/errors.hpp"
#include "gaitmask/resample.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

// ---------------------------------------------------------------------------
// Perturbation vocabulary
// ---------------------------------------------------------------------------

enum class PerturbKind {
  identity,
  remove_variations,    // keep macro: smooth trajectory only
  remove_trajectories,  // keep micro: residual after smoothing
  coarsen_macro,
  coarsen_micro,
  body_part,
  equalize_amplitude,   // dataset-scoped
  equalize_frequency,   // dataset-scoped
  static_pose,
  resample,
  motion_extraction,
  normalize,
};

enum class SmoothMethod { rolling_average, interpolation };
enum class MaskMode { keep, remove };
enum class PoseMode { average, first };
enum class NormMode { y_axis, all_axes, per_dimension };

inline const char* perturb_kind_name(PerturbKind k) {
  switch (k) {
    case PerturbKind::identity: return "identity";
    case PerturbKind::remove_variations: return "remove-variations";
    case PerturbKind::remove_trajectories: return "remove-trajectories";
    case PerturbKind::coarsen_macro: return "coarsen-macro";
    case PerturbKind::coarsen_micro: return "coarsen-micro";
    case PerturbKind::body_part: return "body-part";
    case PerturbKind::equalize_amplitude: return "equalize-amplitude";
    case PerturbKind::equalize_frequency: return "equalize-frequency";
    case PerturbKind::static_pose: return "static-pose";
    case PerturbKind::resample: return "resample";
    case PerturbKind::motion_extraction: return "motion-extraction";
    case PerturbKind::normalize: return "normalize";
  }
  return "?";
}

struct PerturbationSpec {
  PerturbKind kind = PerturbKind::identity;
  SmoothMethod method = SmoothMethod::rolling_average;
  int window = 1;                        // remove-variations / remove-trajectories
  double step = 100.0;                   // coarsen-macro
  double modulus = 100.0;                // coarsen-micro
  BodyPart part = BodyPart::head;        // body-part
  MaskMode mode = MaskMode::remove;      // body-part
  PoseMode pose_mode = PoseMode::average;
  int target_frames = 10;                // resample
  NormMode norm_mode = NormMode::all_axes;

  bool dataset_scoped() const {
    return kind == PerturbKind::equalize_amplitude || kind == PerturbKind::equalize_frequency;
  }
  bool collapses_time() const { return kind == PerturbKind::static_pose; }

  void validate() const {
    switch (kind) {
      case PerturbKind::remove_variations:
      case PerturbKind::remove_trajectories:
        if (window != 1 && window != 3)
          raise(Errc::invalid_params, "window must be 1 or 3");
        break;
      case PerturbKind::coarsen_macro:
        if (step != 100.0 && step != 1000.0)
          raise(Errc::invalid_params, "step must be 100 or 1000");
        break;
      case PerturbKind::coarsen_micro:
        if (modulus != 1.0 && modulus != 10.0 && modulus != 100.0)
          raise(Errc::invalid_params, "modulus must be 1, 10 or 100");
        break;
      case PerturbKind::resample:
        if (target_frames < 2) raise(Errc::invalid_params, "resample frames must be >= 2");
        break;
      default:
        break;
    }
  }

  std::string format() const;
  static PerturbationSpec parse(const std::string& line);
};

struct Pipeline {
  std::vector<PerturbationSpec> steps;

  bool dataset_scoped() const {
    for (const auto& s : steps)
      if (s.dataset_scoped()) return true;
    return false;
  }

  // A time-collapsing step destroys the frame sequence; only steps that are
  // well-defined on a single pose may follow it.
  void validate() const {
    for (auto& s : steps) s.validate();
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (!steps[i - 1].collapses_time()) continue;
      PerturbKind k = steps[i].kind;
      if (k != PerturbKind::normalize && k != PerturbKind::coarsen_macro &&
          k != PerturbKind::coarsen_micro)
        raise(Errc::invalid_composition,
              "step " + std::to_string(i) + " (" + perturb_kind_name(k) +
                  ") cannot follow static-pose");
    }
  }

  std::string format() const {
    std::string out;
    for (const auto& s : steps) {
      out += s.format();
      out += '\n';
    }
    return out;
  }

  // One step per line, `kind key=value ...`; '#' comments and blank lines are
  // skipped; ';' is accepted as a line separator for inline CLI specs.
  static Pipeline parse(const std::string& text) {
    Pipeline p;
    std::string normalized = text;
    for (char& c : normalized)
      if (c == ';') c = '\n';
    std::istringstream in(normalized);
    std::string line;
    while (std::getline(in, line)) {
      std::size_t a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos || line[a] == '#') continue;
      std::size_t b = line.find_last_not_of(" \t\r");
      p.steps.push_back(PerturbationSpec::parse(line.substr(a, b - a + 1)));
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Spec text format
// ---------------------------------------------------------------------------

inline std::string PerturbationSpec::format() const {
  std::string out = perturb_kind_name(kind);
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (kind) {
    case PerturbKind::remove_variations:
    case PerturbKind::remove_trajectories:
      out += std::string(" method=") +
             (method == SmoothMethod::rolling_average ? "rolling_average" : "interpolation");
      out += " w=" + std::to_string(window);
      break;
    case PerturbKind::coarsen_macro: out += " step=" + num(step); break;
    case PerturbKind::coarsen_micro: out += " modulus=" + num(modulus); break;
    case PerturbKind::body_part:
      out += std::string(" part=") + body_part_name(part);
      out += std::string(" mode=") + (mode == MaskMode::keep ? "keep" : "remove");
      break;
    case PerturbKind::static_pose:
      out += std::string(" mode=") + (pose_mode == PoseMode::average ? "average" : "first");
      break;
    case PerturbKind::resample: out += " frames=" + std::to_string(target_frames); break;
    case PerturbKind::normalize:
      out += std::string(" mode=") + (norm_mode == NormMode::y_axis
                                          ? "y_axis"
                                          : norm_mode == NormMode::all_axes ? "all_axes"
                                                                            : "per_dimension");
      break;
    default: break;
  }
  return out;
}

inline PerturbationSpec PerturbationSpec::parse(const std::string& line) {
  std::istringstream in(line);
  std::string kind_word;
  in >> kind_word;
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      raise(Errc::invalid_params, "expected key=value, got '" + tok + "' in '" + line + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto take = [&kv, &line](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end())
      raise(Errc::invalid_params, std::string("missing '") + key + "' in '" + line + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_or = [&kv](const char* key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  PerturbationSpec s;
  if (kind_word == "identity") {
    s.kind = PerturbKind::identity;
  } else if (kind_word == "remove-variations" || kind_word == "remove-trajectories") {
    s.kind = kind_word == "remove-variations" ? PerturbKind::remove_variations
                                              : PerturbKind::remove_trajectories;
    std::string m = take_or("method", "rolling_average");
    if (m == "rolling_average") s.method = SmoothMethod::rolling_average;
    else if (m == "interpolation") s.method = SmoothMethod::interpolation;
    else raise(Errc::invalid_params, "unknown smoothing method '" + m + "'");
    s.window = std::stoi(take_or("w", "1"));
  } else if (kind_word == "coarsen-macro") {
    s.kind = PerturbKind::coarsen_macro;
    s.step = std::stod(take("step"));
  } else if (kind_word == "coarsen-micro") {
    s.kind = PerturbKind::coarsen_micro;
    s.modulus = std::stod(take("modulus"));
  } else if (kind_word == "body-part") {
    s.kind = PerturbKind::body_part;
    s.part = body_part_from_name(take("part"));
    std::string m = take("mode");
    if (m == "keep") s.mode = MaskMode::keep;
    else if (m == "remove") s.mode = MaskMode::remove;
    else raise(Errc::invalid_params, "body-part mode must be keep or remove");
  } else if (kind_word == "equalize-amplitude") {
    s.kind = PerturbKind::equalize_amplitude;
  } else if (kind_word == "equalize-frequency") {
    s.kind = PerturbKind::equalize_frequency;
  } else if (kind_word == "static-pose") {
    s.kind = PerturbKind::static_pose;
    std::string m = take_or("mode", "average");
    if (m == "average") s.pose_mode = PoseMode::average;
    else if (m == "first") s.pose_mode = PoseMode::first;
    else raise(Errc::invalid_params, "static-pose mode must be average or first");
  } else if (kind_word == "resample") {
    s.kind = PerturbKind::resample;
    s.target_frames = std::stoi(take_or("frames", "10"));
  } else if (kind_word == "motion-extraction") {
    s.kind = PerturbKind::motion_extraction;
  } else if (kind_word == "normalize") {
    s.kind = PerturbKind::normalize;
    std::string m = take_or("mode", "all_axes");
    if (m == "y_axis") s.norm_mode = NormMode::y_axis;
    else if (m == "all_axes") s.norm_mode = NormMode::all_axes;
    else if (m == "per_dimension") s.norm_mode = NormMode::per_dimension;
    else raise(Errc::invalid_params, "normalize mode must be y_axis, all_axes or per_dimension");
  } else {
    raise(Errc::invalid_params, "unknown perturbation '" + kind_word + "'");
  }
  if (!kv.empty())
    raise(Errc::invalid_params, "unexpected key '" + kv.begin()->first + "' in '" + line + "'");
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Frame-local operators. All pure; none mutates its input.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Fn>
GaitSample map_coords(const GaitSample& sample, Fn&& fn) {
  GaitSample out = sample;
  for (auto& frame : out.frames)
    for (auto& p : frame) {
      p.x = fn(p.x);
      p.y = fn(p.y);
      p.z = fn(p.z);
    }
  return out;
}

}  // namespace detail

// Smooth "ideal" trajectory: rolling average over a window truncated at the
// boundaries, or the window-edge midpoint with boundary frames copied.
inline GaitSample ideal_trajectory(const GaitSample& sample, SmoothMethod method, int w) {
  if (w < 1) raise(Errc::invalid_params, "window must be positive");
  const long t_count = static_cast<long>(sample.frame_count());
  if (t_count <= 2 * static_cast<long>(w))
    raise(Errc::window_too_large, "need more than " + std::to_string(2 * w) + " frames, got " +
                                      std::to_string(t_count));
  const std::size_t m = sample.marker_count();
  GaitSample out = sample;
  for (long t = 0; t < t_count; ++t) {
    Pose& dst = out.frames[static_cast<std::size_t>(t)];
    if (method == SmoothMethod::rolling_average) {
      long lo = t - w > 0 ? t - w : 0;
      long hi = t + w < t_count - 1 ? t + w : t_count - 1;
      double inv = 1.0 / static_cast<double>(hi - lo + 1);
      for (std::size_t j = 0; j < m; ++j) {
        Vec3 acc{};
        for (long u = lo; u <= hi; ++u) acc = acc + sample.frames[static_cast<std::size_t>(u)][j];
        dst[j] = inv * acc;
      }
    } else {
      if (t - w < 0 || t + w > t_count - 1) continue;  // boundary frames copied unchanged
      const Pose& a = sample.frames[static_cast<std::size_t>(t - w)];
      const Pose& b = sample.frames[static_cast<std::size_t>(t + w)];
      for (std::size_t j = 0; j < m; ++j) dst[j] = 0.5 * (a[j] + b[j]);
    }
  }
  return out;
}

// Residual after removing the ideal trajectory; ideal + residual reconstructs
// the sample channel-wise.
inline GaitSample remove_trajectories(const GaitSample& sample, SmoothMethod method, int w) {
  GaitSample ideal = ideal_trajectory(sample, method, w);
  GaitSample out = sample;
  for (std::size_t t = 0; t < out.frames.size(); ++t)
    for (std::size_t j = 0; j < out.frames[t].size(); ++j)
      out.frames[t][j] = sample.frames[t][j] - ideal.frames[t][j];
  return out;
}

// Keep the most significant digits: floor quantization toward -inf, so that
// coarsen_macro(x, k) + coarsen_micro(x, k) recovers x.
inline GaitSample coarsen_macro(const GaitSample& sample, double step) {
  if (step <= 0.0) raise(Errc::invalid_params, "step must be positive");
  return detail::map_coords(sample, [step](double x) { return std::floor(x / step) * step; });
}

// Keep the least significant digits: Euclidean remainder in [0, modulus).
inline GaitSample coarsen_micro(const GaitSample& sample, double modulus) {
  if (modulus <= 0.0) raise(Errc::invalid_params, "modulus must be positive");
  return detail::map_coords(sample, [modulus](double x) {
    double r = x - std::floor(x / modulus) * modulus;
    if (r < 0.0) r += modulus;
    if (r >= modulus) r = 0.0;  // rounding can land exactly on the modulus for |x| << modulus
    return r;
  });
}

// Zero out one body part (remove) or everything but that part (keep).
// Untouched markers stay bit-identical; masked markers are exactly (0,0,0).
inline GaitSample body_part_mask(const GaitSample& sample, const BodyPartMap& map, BodyPart part,
                                 MaskMode mode) {
  if (map.group_of.size() != sample.marker_count())
    raise(Errc::unknown_part, "body part map does not match sample marker count");
  GaitSample out = sample;
  for (auto& frame : out.frames)
    for (std::size_t j = 0; j < frame.size(); ++j) {
      bool in_part = map.group_of[j] == part;
      bool zero = mode == MaskMode::remove ? in_part : !in_part;
      if (zero) frame[j] = Vec3{};
    }
  return out;
}

// Collapse to a single pose: frame-wise mean or frame 0.
inline GaitSample static_pose(const GaitSample& sample, PoseMode mode) {
  if (sample.frames.empty()) raise(Errc::too_few_frames, "static_pose needs at least one frame");
  GaitSample out;
  out.subject_id = sample.subject_id;
  out.sample_id = sample.sample_id;
  out.frame_rate_hz = sample.frame_rate_hz;
  if (mode == PoseMode::first) {
    out.frames.push_back(sample.frames.front());
    return out;
  }
  const std::size_t m = sample.marker_count();
  Pose mean(m);
  for (const auto& frame : sample.frames)
    for (std::size_t j = 0; j < m; ++j) mean[j] = mean[j] + frame[j];
  double inv = 1.0 / static_cast<double>(sample.frame_count());
  for (auto& p : mean) p = inv * p;
  out.frames.push_back(std::move(mean));
  return out;
}

inline GaitSample resample_static(const GaitSample& sample, int target_frames = 10) {
  return time_normalize(sample, target_frames);
}

// Frame-to-frame differences; output has T-1 frames.
inline GaitSample motion_extraction(const GaitSample& sample) {
  if (sample.frame_count() < 2)
    raise(Errc::too_few_frames, "motion_extraction needs at least 2 frames");
  GaitSample out;
  out.subject_id = sample.subject_id;
  out.sample_id = sample.sample_id;
  out.frame_rate_hz = sample.frame_rate_hz;
  out.frames.resize(sample.frame_count() - 1);
  for (std::size_t t = 0; t + 1 < sample.frame_count(); ++t) {
    const Pose& a = sample.frames[t];
    const Pose& b = sample.frames[t + 1];
    Pose& dst = out.frames[t];
    dst.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) dst[j] = b[j] - a[j];
  }
  return out;
}

// Z-score with statistics pooled over the whole sequence. Channels with
// near-zero spread are centered only.
inline GaitSample normalize(const GaitSample& sample, NormMode mode) {
  if (sample.frames.empty()) raise(Errc::too_few_frames, "normalize needs at least one frame");
  constexpr double kSigmaFloor = 1e-12;
  const std::size_t m = sample.marker_count();
  const std::size_t t_count = sample.frame_count();
  GaitSample out = sample;

  auto zscore = [&](int axis_lo, int axis_hi) {
    for (int a = axis_lo; a <= axis_hi; ++a) {
      double sum = 0.0, sq = 0.0;
      for (const auto& frame : sample.frames)
        for (const auto& p : frame) {
          double v = p.axis(a);
          sum += v;
          sq += v * v;
        }
      double n = static_cast<double>(m * t_count);
      double mean = sum / n;
      double var = sq / n - mean * mean;
      double sd = var > 0.0 ? std::sqrt(var) : 0.0;
      double scale = sd < kSigmaFloor ? 1.0 : 1.0 / sd;
      for (auto& frame : out.frames)
        for (auto& p : frame) p.axis(a) = (p.axis(a) - mean) * scale;
    }
  };

  switch (mode) {
    case NormMode::y_axis: {
      // Pool one (mean, sd) over every y value; x and z stay bit-identical.
      double sum = 0.0, sq = 0.0;
      for (const auto& frame : sample.frames)
        for (const auto& p : frame) {
          sum += p.y;
          sq += p.y * p.y;
        }
      double n = static_cast<double>(m * t_count);
      double mean = sum / n;
      double var = sq / n - mean * mean;
      double sd = var > 0.0 ? std::sqrt(var) : 0.0;
      double scale = sd < kSigmaFloor ? 1.0 : 1.0 / sd;
      for (auto& frame : out.frames)
        for (auto& p : frame) p.y = (p.y - mean) * scale;
      break;
    }
    case NormMode::all_axes:
      zscore(0, 2);
      break;
    case NormMode::per_dimension:
      for (std::size_t j = 0; j < m; ++j)
        for (int a = 0; a < 3; ++a) {
          double sum = 0.0, sq = 0.0;
          for (const auto& frame : sample.frames) {
            double v = frame[j].axis(a);
            sum += v;
            sq += v * v;
          }
          double n = static_cast<double>(t_count);
          double mean = sum / n;
          double var = sq / n - mean * mean;
          double sd = var > 0.0 ? std::sqrt(var) : 0.0;
          double scale = sd < kSigmaFloor ? 1.0 : 1.0 / sd;
          for (auto& frame : out.frames) frame[j].axis(a) = (frame[j].axis(a) - mean) * scale;
        }
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline application
// ---------------------------------------------------------------------------

inline GaitSample apply_step(const GaitSample& sample, const PerturbationSpec& spec,
                             const BodyPartMap& map) {
  switch (spec.kind) {
    case PerturbKind::identity: return sample;
    case PerturbKind::remove_variations: return ideal_trajectory(sample, spec.method, spec.window);
    case PerturbKind::remove_trajectories:
      return remove_trajectories(sample, spec.method, spec.window);
    case PerturbKind::coarsen_macro: return coarsen_macro(sample, spec.step);
    case PerturbKind::coarsen_micro: return coarsen_micro(sample, spec.modulus);
    case PerturbKind::body_part: return body_part_mask(sample, map, spec.part, spec.mode);
    case PerturbKind::static_pose: return static_pose(sample, spec.pose_mode);
    case PerturbKind::resample: return resample_static(sample, spec.target_frames);
    case PerturbKind::motion_extraction: return motion_extraction(sample);
    case PerturbKind::normalize: return normalize(sample, spec.norm_mode);
    case PerturbKind::equalize_amplitude:
    case PerturbKind::equalize_frequency:
      raise(Errc::scope_mismatch, "equalize steps operate on whole datasets, not single samples");
  }
  raise(Errc::invalid_params, "unhandled perturbation kind");
}

inline GaitSample apply_pipeline(const GaitSample& sample, const Pipeline& pipeline,
                                 const BodyPartMap& map) {
  pipeline.validate();
  GaitSample cur = sample;
  for (const auto& spec : pipeline.steps) cur = apply_step(cur, spec, map);
  return cur;
}

// Dataset-scoped application is defined in sinusoid.hpp (it needs the
// equalization model).
inline Dataset apply_pipeline(const Dataset& dataset, const Pipeline& pipeline);

}  // namespace gaitmask
