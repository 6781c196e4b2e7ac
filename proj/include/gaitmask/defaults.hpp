#pragma once

#include <json.hpp>

namespace gaitmask::defaults {

// Every numeric default in one place; echoed into result records so each
// artifact documents the configuration that produced it.
inline constexpr double kForceThresholdN = 20.0;
inline constexpr int kStrideFrames = 100;
inline constexpr int kStaticResampleFrames = 10;
inline constexpr int kSmoothWindows[2] = {1, 3};
inline constexpr double kMacroSteps[2] = {100.0, 1000.0};
inline constexpr double kMicroModuli[3] = {1.0, 10.0, 100.0};
inline constexpr double kTrainFraction = 0.75;
inline constexpr int kRepetitions = 10;
inline constexpr int kCvFolds = 10;
inline constexpr double kVarianceFraction = 0.95;
inline constexpr double kCValues[6] = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
inline constexpr double kGammaFactors[3] = {0.1, 1.0, 10.0};
inline constexpr double kSmoKktTolerance = 1e-3;
inline constexpr long kSmoMaxKernelEvals = 10'000'000;
inline constexpr int kStrideDebounceSamples = 10;
inline constexpr double kPldAzimuthDeg = 45.0;

inline nlohmann::json table() {
  nlohmann::json j;
  j["force_threshold_n"] = kForceThresholdN;
  j["stride_frames"] = kStrideFrames;
  j["static_resample_frames"] = kStaticResampleFrames;
  j["smooth_windows"] = {1, 3};
  j["macro_steps"] = {100.0, 1000.0};
  j["micro_moduli"] = {1.0, 10.0, 100.0};
  j["train_fraction"] = kTrainFraction;
  j["repetitions"] = kRepetitions;
  j["cv_folds"] = kCvFolds;
  j["variance_fraction"] = kVarianceFraction;
  j["c_values"] = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  j["gamma_factors"] = {0.1, 1.0, 10.0};
  j["smo_kkt_tolerance"] = kSmoKktTolerance;
  j["smo_max_kernel_evals"] = kSmoMaxKernelEvals;
  j["stride_debounce_samples"] = kStrideDebounceSamples;
  j["pld_azimuth_deg"] = kPldAzimuthDeg;
  return j;
}

}  // namespace gaitmask::defaults
