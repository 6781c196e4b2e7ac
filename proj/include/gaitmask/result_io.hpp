#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gaitmask/suite.hpp"

namespace gaitmask {

// Rebuilds the summary view of a stored result record, enough to regenerate
// the combined CSV and the median table.
inline ConditionOutcome outcome_from_result_json(const json& j) {
  ConditionOutcome oc;
  oc.name = j.value("condition", "unnamed");
  oc.task = task_from_name(j.value("task", "identity"));
  oc.ok = true;
  ExperimentResult r;
  r.task = oc.task;
  r.pipeline_text = j.value("pipeline", "");
  r.train_fraction = j.value("train_fraction", 0.0);
  r.repetitions = j.value("repetitions", 0);
  r.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
  r.chance_level = j.value("chance_level", 0.0);
  r.reported_encoding = encoding_from_name(j.value("reported_encoding", "flatten"));
  r.wall_clock_s = j.value("wall_clock_s", 0.0);
  for (const auto& je : j.at("encodings")) {
    EncodingOutcome e;
    e.encoding = encoding_from_name(je.at("encoding").get<std::string>());
    e.run_accuracies = je.at("accuracies").get<std::vector<double>>();
    e.quartiles.min = je.at("min").get<double>();
    e.quartiles.q1 = je.at("q1").get<double>();
    e.quartiles.median = je.at("median").get<double>();
    e.quartiles.q3 = je.at("q3").get<double>();
    e.quartiles.max = je.at("max").get<double>();
    e.degenerate_segments = je.value("degenerate_segments", 0L);
    r.encodings.push_back(std::move(e));
  }
  oc.result = std::move(r);
  return oc;
}

}  // namespace gaitmask
