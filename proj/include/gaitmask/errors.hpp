#pragma once

#include <stdexcept>
#include <string>

namespace gaitmask {

// Every failure mode the library reports, so tests can assert on the code
// instead of parsing messages.
enum class Errc {
  missing_metadata,
  malformed_frame,
  unknown_marker,
  duplicate_subject,
  no_stride_found,
  incomplete_stride,
  rate_mismatch,
  too_few_frames,
  window_too_large,
  unknown_part,
  degenerate_data,
  invalid_composition,
  scope_mismatch,
  incomplete_reduction_map,
  empty_matrix,
  single_class,
  non_positive_hyperparameter,
  length_mismatch,
  empty_input,
  too_few_samples,
  single_sex_side,
  invalid_params,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_metadata: return "MissingMetadata";
    case Errc::malformed_frame: return "MalformedFrame";
    case Errc::unknown_marker: return "UnknownMarker";
    case Errc::duplicate_subject: return "DuplicateSubject";
    case Errc::no_stride_found: return "NoStrideFound";
    case Errc::incomplete_stride: return "IncompleteStride";
    case Errc::rate_mismatch: return "RateMismatch";
    case Errc::too_few_frames: return "TooFewFrames";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::unknown_part: return "UnknownPart";
    case Errc::degenerate_data: return "DegenerateData";
    case Errc::invalid_composition: return "InvalidComposition";
    case Errc::scope_mismatch: return "ScopeMismatch";
    case Errc::incomplete_reduction_map: return "IncompleteReductionMap";
    case Errc::empty_matrix: return "EmptyMatrix";
    case Errc::single_class: return "SingleClass";
    case Errc::non_positive_hyperparameter: return "NonPositiveHyperparameter";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_input: return "Empty";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::single_sex_side: return "SingleSexSide";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gaitmask
