#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitmask/defaults.hpp"
#include "gaitmask/experiment.hpp"
#include "gaitmask/io.hpp"
#include "gaitmask/threading.hpp"

namespace gaitmask {

struct SuiteCondition {
  std::string name;
  ExperimentConfig config;
};

struct Suite {
  std::string name;
  std::vector<SuiteCondition> conditions;
};

namespace detail {

inline void apply_config_overrides(ExperimentConfig& config, const json& j) {
  if (j.contains("repetitions")) config.repetitions = j.at("repetitions").get<int>();
  if (j.contains("train_fraction")) config.train_fraction = j.at("train_fraction").get<double>();
  if (j.contains("base_seed")) config.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("folds")) config.learner.folds = j.at("folds").get<int>();
  if (j.contains("variance_fraction"))
    config.learner.variance_fraction = j.at("variance_fraction").get<double>();
  if (j.contains("c_values")) config.learner.c_values = j.at("c_values").get<std::vector<double>>();
  if (j.contains("gamma_factors"))
    config.learner.gamma_factors = j.at("gamma_factors").get<std::vector<double>>();
  if (j.contains("encodings")) {
    config.encodings.clear();
    for (const auto& e : j.at("encodings"))
      config.encodings.push_back(encoding_from_name(e.get<std::string>()));
  }
}

inline Pipeline pipeline_from_json(const json& j) {
  std::string text;
  if (j.is_string()) {
    text = j.get<std::string>();
  } else {
    for (const auto& step : j) {
      text += step.get<std::string>();
      text += '\n';
    }
  }
  return Pipeline::parse(text);
}

}  // namespace detail

// Suite file: named conditions, each task + pipeline + overrides over the
// suite-level defaults.
inline Suite parse_suite_json(const json& j) {
  Suite suite;
  suite.name = j.value("name", "suite");
  ExperimentConfig base;
  if (j.contains("defaults")) detail::apply_config_overrides(base, j.at("defaults"));
  if (!j.contains("conditions")) raise(Errc::invalid_params, "suite file lacks 'conditions'");
  for (const auto& jc : j.at("conditions")) {
    SuiteCondition cond;
    if (!jc.contains("name")) raise(Errc::invalid_params, "suite condition lacks 'name'");
    cond.name = jc.at("name").get<std::string>();
    cond.config = base;
    try {
      cond.config.task = task_from_name(jc.value("task", "identity"));
      cond.config.pipeline =
          jc.contains("pipeline") ? detail::pipeline_from_json(jc.at("pipeline")) : Pipeline{};
      cond.config.pipeline.validate();
      if (jc.contains("overrides")) detail::apply_config_overrides(cond.config, jc.at("overrides"));
    } catch (const Error& e) {
      raise(e.code(), std::string(e.what()) + " (condition '" + cond.name + "')");
    }
    for (const auto& existing : suite.conditions)
      if (existing.name == cond.name)
        raise(Errc::invalid_params, "duplicate condition name '" + cond.name + "'");
    suite.conditions.push_back(std::move(cond));
  }
  return suite;
}

inline Suite load_suite(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(Errc::invalid_params, path.string() + ": " + e.what());
  }
  return parse_suite_json(j);
}

struct ConditionOutcome {
  std::string name;
  Task task = Task::identity;
  bool ok = false;
  std::string error;  // set when !ok
  std::optional<ExperimentResult> result;
};

// Conditions run independently (optionally in parallel); one failure does not
// abort the suite. Results are merged by condition order, so output is
// deterministic for any thread count.
inline std::vector<ConditionOutcome> run_suite(const Dataset& dataset, const Suite& suite,
                                               int threads = 1) {
  std::vector<ConditionOutcome> outcomes(suite.conditions.size());
  parallel_for_indexed(suite.conditions.size(), 1, [&](std::size_t i) {
    const auto& cond = suite.conditions[i];
    outcomes[i].name = cond.name;
    outcomes[i].task = cond.config.task;
    try {
      ExperimentConfig config = cond.config;
      config.threads = threads;
      outcomes[i].result = run_experiment(dataset, config);
      outcomes[i].ok = true;
    } catch (const std::exception& e) {
      outcomes[i].ok = false;
      outcomes[i].error = e.what();
    }
  });
  return outcomes;
}

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

inline json experiment_result_to_json(const std::string& condition_name,
                                      const ExperimentResult& r) {
  json j;
  j["condition"] = condition_name;
  j["task"] = task_name(r.task);
  j["pipeline"] = r.pipeline_text;
  j["train_fraction"] = r.train_fraction;
  j["repetitions"] = r.repetitions;
  j["base_seed"] = r.base_seed;
  j["chance_level"] = r.chance_level;
  j["reported_encoding"] = encoding_name(r.reported_encoding);
  j["wall_clock_s"] = r.wall_clock_s;
  j["defaults"] = defaults::table();
  json encodings = json::array();
  for (const auto& e : r.encodings) {
    json je;
    je["encoding"] = encoding_name(e.encoding);
    je["accuracies"] = e.run_accuracies;
    je["min"] = e.quartiles.min;
    je["q1"] = e.quartiles.q1;
    je["median"] = e.quartiles.median;
    je["q3"] = e.quartiles.q3;
    je["max"] = e.quartiles.max;
    je["degenerate_segments"] = e.degenerate_segments;
    json sel = json::array();
    for (auto [c, g] : e.selected_params) sel.push_back({{"C", c}, {"gamma", g}});
    je["selected_params"] = std::move(sel);
    bool cap = false;
    for (bool b : e.smo_cap_reached) cap = cap || b;
    je["smo_cap_reached"] = cap;
    encodings.push_back(std::move(je));
  }
  j["encodings"] = std::move(encodings);
  return j;
}

// Combined CSV: one row per condition x encoding, ready for boxplot
// rendering. Deliberately excludes wall-clock so reruns are byte-identical.
inline std::string combined_report_csv(const std::vector<ConditionOutcome>& outcomes) {
  std::string out =
      "condition,task,encoding,reported,status,chance_level,min,q1,median,q3,max,"
      "repetitions,degenerate_segments\n";
  for (const auto& oc : outcomes) {
    if (!oc.ok) {
      out += oc.name + "," + task_name(oc.task) + ",,,failed,,,,,,,,\n";
      continue;
    }
    const ExperimentResult& r = *oc.result;
    for (const auto& e : r.encodings) {
      out += oc.name;
      out += ',';
      out += task_name(r.task);
      out += ',';
      out += encoding_name(e.encoding);
      out += ',';
      out += e.encoding == r.reported_encoding ? '1' : '0';
      out += ",ok,";
      append_double(out, r.chance_level);
      out += ',';
      append_double(out, e.quartiles.min);
      out += ',';
      append_double(out, e.quartiles.q1);
      out += ',';
      append_double(out, e.quartiles.median);
      out += ',';
      append_double(out, e.quartiles.q3);
      out += ',';
      append_double(out, e.quartiles.max);
      out += ',';
      out += std::to_string(r.repetitions);
      out += ',';
      out += std::to_string(e.degenerate_segments);
      out += '\n';
    }
  }
  return out;
}

// Condition x median-accuracy table for terminal output.
inline std::string render_median_table(const std::vector<ConditionOutcome>& outcomes) {
  std::string out = "condition                                task      median(best)  chance\n";
  for (const auto& oc : outcomes) {
    char line[160];
    if (oc.ok) {
      const ExperimentResult& r = *oc.result;
      double median = 0.0;
      for (const auto& e : r.encodings)
        if (e.encoding == r.reported_encoding) median = e.quartiles.median;
      std::snprintf(line, sizeof(line), "%-40s %-9s %12.4f  %6.4f\n", oc.name.c_str(),
                    task_name(r.task), median, r.chance_level);
    } else {
      std::snprintf(line, sizeof(line), "%-40s %-9s %12s  %s\n", oc.name.c_str(),
                    task_name(oc.task), "FAILED", oc.error.c_str());
    }
    out += line;
  }
  return out;
}

}  // namespace gaitmask
