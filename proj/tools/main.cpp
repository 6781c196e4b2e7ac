// Command-line entry point for the gait feature-masking toolkit: dataset
// ingestion, perturbation, recognition experiments, and point-light exports.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitmask/gaitmask.hpp"
#include "gaitmask/result_io.hpp"

namespace {

using namespace gaitmask;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int log_verbosity = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
  if (log_verbosity >= 1) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_verbosity >= 2) std::cerr << msg << "\n";
}

// Configuration and input-contract problems exit 2; mid-run failures exit 1.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_params:
    case Errc::invalid_composition:
    case Errc::scope_mismatch:
    case Errc::unknown_part:
    case Errc::missing_metadata:
    case Errc::unknown_marker:
    case Errc::duplicate_subject:
    case Errc::incomplete_reduction_map:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

struct GlobalOpts {
  std::string data_root;
  std::string layout;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string log_level = "info";
};

fs::path layout_path(const GlobalOpts& g) {
  if (!g.layout.empty()) return g.layout;
  if (!g.data_root.empty()) return fs::path(g.data_root) / "layout.json";
  return {};
}

Dataset load_input_dataset(const GlobalOpts& g) {
  if (g.data_root.empty()) raise(Errc::invalid_params, "--data-root is required");
  fs::path layout = layout_path(g);
  if (layout.empty() || !fs::exists(layout))
    raise(Errc::missing_metadata, "layout file not found (use --layout): " + layout.string());
  return load_dataset(g.data_root, layout);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const GlobalOpts& g, int subjects, int samples, double noise_mm, bool raw,
              int frames) {
  Dataset ds;
  if (!raw) {
    ds = synth::generate_dataset(subjects, samples, g.seed, noise_mm, frames);
    save_dataset(ds, g.out_dir);
    log_info("wrote " + std::to_string(ds.total_samples()) + " normalized samples to " +
             g.out_dir);
    return kExitOk;
  }

  // Raw recordings with force plates, for exercising `ingest`.
  ds.layout = synth::synthetic_layout();
  ds.body_parts = synth::synthetic_body_part_map(ds.layout);
  auto population = synth::sample_population(subjects, g.seed, noise_mm);
  DatasetManifest manifest;
  manifest.frame_rate_hz = 250.0;
  manifest.force_rate_hz = 1000.0;
  for (int i = 0; i < subjects; ++i) {
    SubjectEntry se;
    se.subject_id = synth::subject_name(i);
    se.sex = population[static_cast<std::size_t>(i)].sex;
    for (int k = 0; k < samples; ++k) {
      std::string sid = synth::sample_name(k);
      synth::RawRecording rec = synth::render_walker_raw(
          population[static_cast<std::size_t>(i)], se.subject_id, sid,
          derive_seed(g.seed, "raw", static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(k)));
      SampleEntry entry;
      entry.sample_id = sid;
      entry.marker_file = se.subject_id + "/" + sid + "_markers.csv";
      entry.force_file = se.subject_id + "/" + sid + "_forces.csv";
      write_marker_csv(fs::path(g.out_dir) / entry.marker_file, rec.sample, ds.layout);
      write_force_csv(fs::path(g.out_dir) / *entry.force_file, rec.plate1, rec.plate2);
      se.samples.push_back(std::move(entry));
    }
    manifest.subjects.push_back(std::move(se));
  }
  save_manifest(g.out_dir, manifest);
  save_layout(fs::path(g.out_dir) / "layout.json", ds.layout, ds.body_parts);
  log_info("wrote " + std::to_string(subjects * samples) + " raw recordings to " + g.out_dir);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const GlobalOpts& g, double threshold_n, int frames, bool keep_going) {
  if (g.data_root.empty()) raise(Errc::invalid_params, "--data-root is required");
  fs::path layout_file = layout_path(g);
  if (layout_file.empty() || !fs::exists(layout_file))
    raise(Errc::missing_metadata, "layout file not found (use --layout): " + layout_file.string());

  LayoutFile lf = load_layout(layout_file);
  DatasetManifest manifest = load_manifest(g.data_root);

  Dataset out;
  out.layout = lf.layout;
  out.body_parts = lf.body_parts;
  std::vector<std::string> skipped;
  for (const auto& se : manifest.subjects) {
    Subject subj;
    subj.subject_id = se.subject_id;
    subj.sex = se.sex;
    for (const auto& entry : se.samples) {
      std::string tag = se.subject_id + "/" + entry.sample_id;
      try {
        GaitSample raw;
        raw.subject_id = se.subject_id;
        raw.sample_id = entry.sample_id;
        raw.frame_rate_hz = manifest.frame_rate_hz;
        raw.frames = read_marker_csv(fs::path(g.data_root) / entry.marker_file, out.layout);
        if (!entry.force_file)
          raise(Errc::missing_metadata, tag + " has no force file reference");
        auto [p1, p2] =
            read_force_csv(fs::path(g.data_root) / *entry.force_file, manifest.force_rate_hz);
        FrameInterval stride = segment_stride(p1, p2, manifest.frame_rate_hz, threshold_n,
                                              defaults::kStrideDebounceSamples);
        long t_raw = static_cast<long>(raw.frame_count());
        if (stride.start >= t_raw)
          raise(Errc::incomplete_stride, tag + ": stride starts beyond the recording");
        long end = std::min(stride.end, t_raw);
        GaitSample cut = raw;
        cut.frames.assign(raw.frames.begin() + stride.start, raw.frames.begin() + end);
        subj.samples.push_back(time_normalize(cut, frames));
        std::printf("%s: stride [%ld, %ld) -> %d frames\n", tag.c_str(), stride.start, end,
                    frames);
      } catch (const Error& e) {
        if (!keep_going) throw;
        skipped.push_back(tag + ": " + e.what());
      }
    }
    if (!subj.samples.empty()) out.subjects.push_back(std::move(subj));
  }
  save_dataset(out, g.out_dir);
  std::printf("ingested %zu samples into %s\n", out.total_samples(), g.out_dir.c_str());
  if (!skipped.empty()) {
    std::printf("skipped %zu file(s):\n", skipped.size());
    for (const auto& s : skipped) std::printf("  %s\n", s.c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// perturb
// ---------------------------------------------------------------------------

int cmd_perturb(const GlobalOpts& g, const std::string& pipeline_text,
                const std::string& pipeline_file) {
  std::string text = pipeline_text;
  if (!pipeline_file.empty()) text = read_text_file(pipeline_file);
  Pipeline pipeline = Pipeline::parse(text);
  pipeline.validate();
  Dataset ds = load_input_dataset(g);
  Dataset out = apply_pipeline(ds, pipeline);
  save_dataset(out, g.out_dir);
  log_info("applied " + std::to_string(pipeline.steps.size()) + " step(s), wrote " + g.out_dir);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run / report
// ---------------------------------------------------------------------------

int cmd_run(const GlobalOpts& g, const std::string& suite_file) {
  Suite suite = load_suite(suite_file);
  if (g.seed_given)
    for (auto& cond : suite.conditions) cond.config.base_seed = g.seed;
  Dataset ds = load_input_dataset(g);

  auto outcomes = run_suite(ds, suite, g.threads);

  fs::path results_dir = fs::path(g.out_dir) / "results";
  for (const auto& oc : outcomes) {
    if (oc.ok) {
      write_text_file(results_dir / (oc.name + ".json"),
                      experiment_result_to_json(oc.name, *oc.result).dump(2) + "\n");
    } else {
      json j;
      j["condition"] = oc.name;
      j["task"] = task_name(oc.task);
      j["error"] = oc.error;
      write_text_file(results_dir / (oc.name + ".failed.json"), j.dump(2) + "\n");
    }
  }
  write_text_file(fs::path(g.out_dir) / "combined.csv", combined_report_csv(outcomes));
  std::printf("%s", render_median_table(outcomes).c_str());
  for (const auto& oc : outcomes)
    if (!oc.ok) {
      std::fprintf(stderr, "condition '%s' failed: %s\n", oc.name.c_str(), oc.error.c_str());
      return kExitRuntime;
    }
  return kExitOk;
}

int cmd_report(const GlobalOpts& g) {
  fs::path results_dir = fs::path(g.out_dir) / "results";
  if (!fs::exists(results_dir))
    raise(Errc::missing_metadata, "no results directory under " + g.out_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (entry.path().extension() == ".json" &&
        entry.path().string().find(".failed.json") == std::string::npos)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ConditionOutcome> outcomes;
  for (const auto& f : files)
    outcomes.push_back(outcome_from_result_json(json::parse(read_text_file(f))));
  write_text_file(fs::path(g.out_dir) / "combined.csv", combined_report_csv(outcomes));
  std::printf("%s", render_median_table(outcomes).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export-pld
// ---------------------------------------------------------------------------

int cmd_export_pld(const GlobalOpts& g, const std::string& sample_ref, double azimuth_deg,
                   const std::string& pipeline_text, const std::string& out_file) {
  Dataset ds = load_input_dataset(g);
  if (!pipeline_text.empty()) {
    Pipeline pipeline = Pipeline::parse(pipeline_text);
    pipeline.validate();
    ds = apply_pipeline(ds, pipeline);
  }
  auto slash = sample_ref.find('/');
  if (slash == std::string::npos)
    raise(Errc::invalid_params, "--sample expects SUBJECT/SAMPLE, got '" + sample_ref + "'");
  std::string subject_id = sample_ref.substr(0, slash);
  std::string sample_id = sample_ref.substr(slash + 1);
  const Subject* subj = ds.find_subject(subject_id);
  if (!subj) raise(Errc::invalid_params, "unknown subject '" + subject_id + "'");
  const GaitSample* found = nullptr;
  for (const auto& s : subj->samples)
    if (s.sample_id == sample_id) found = &s;
  if (!found) raise(Errc::invalid_params, "unknown sample '" + sample_ref + "'");
  export_pld(*found, out_file, azimuth_deg);
  log_info("wrote " + out_file);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitmask - gait feature masking and recognition toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--data-root", g.data_root, "Dataset root directory")
      ->envname("GAITMASK_DATA_ROOT");
  app.add_option("--layout", g.layout, "Layout file (default: <data-root>/layout.json)")
      ->envname("GAITMASK_LAYOUT");
  app.add_option("--out-dir", g.out_dir, "Output directory")->envname("GAITMASK_OUT_DIR");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "Base random seed")->envname("GAITMASK_SEED");
  app.add_option("--threads", g.threads, "Worker thread bound (>= 1)")
      ->envname("GAITMASK_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "quiet|info|debug")->envname("GAITMASK_LOG_LEVEL");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic walker dataset");
  int sy_subjects = 10, sy_samples = 10, sy_frames = 100;
  double sy_noise = 2.0;
  bool sy_raw = false;
  synth_cmd->add_option("--subjects", sy_subjects, "Subject count (>= 2)");
  synth_cmd->add_option("--samples", sy_samples, "Samples per subject (>= 2)");
  synth_cmd->add_option("--noise-mm", sy_noise, "Per-sample marker noise (mm)");
  synth_cmd->add_option("--frames", sy_frames, "Frames per normalized sample");
  synth_cmd->add_flag("--raw", sy_raw, "Emit raw 250Hz recordings with force plates");

  // ingest
  auto* ingest_cmd =
      app.add_subcommand("ingest", "Trim raw recordings to one stride and normalize to 100 frames");
  double in_threshold = defaults::kForceThresholdN;
  int in_frames = defaults::kStrideFrames;
  bool in_keep_going = false;
  ingest_cmd->add_option("--threshold-n", in_threshold, "Ground force threshold (N)");
  ingest_cmd->add_option("--frames", in_frames, "Frames per normalized sample");
  ingest_cmd->add_flag("--keep-going", in_keep_going, "Skip corrupt files, list them at the end");

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "Apply a perturbation pipeline to a dataset");
  std::string pe_pipeline, pe_pipeline_file;
  perturb_cmd->add_option("--pipeline", pe_pipeline,
                          "Inline pipeline, steps separated by ';' (kind key=value ...)");
  perturb_cmd->add_option("--pipeline-file", pe_pipeline_file, "Pipeline file, one step per line");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run an experiment suite");
  std::string run_suite_file;
  run_cmd->add_option("--suite", run_suite_file, "Suite file (JSON)")->required();

  // report
  app.add_subcommand("report", "Rebuild the combined CSV and table from stored results");

  // export-pld
  auto* pld_cmd = app.add_subcommand("export-pld", "Export point-light display projections");
  std::string pld_sample, pld_pipeline, pld_out = "pld.csv";
  double pld_azimuth = defaults::kPldAzimuthDeg;
  pld_cmd->add_option("--sample", pld_sample, "SUBJECT/SAMPLE to export")->required();
  pld_cmd->add_option("--azimuth", pld_azimuth, "View azimuth about the vertical axis (degrees)");
  pld_cmd->add_option("--pipeline", pld_pipeline, "Optional pipeline applied before export");
  pld_cmd->add_option("--out", pld_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  g.seed_given = seed_opt->count() > 0;
  log_verbosity = g.log_level == "quiet" ? 0 : (g.log_level == "debug" ? 2 : 1);
  log_debug("seed=" + std::to_string(g.seed) + " threads=" + std::to_string(g.threads));

  try {
    if (synth_cmd->parsed()) return cmd_synth(g, sy_subjects, sy_samples, sy_noise, sy_raw, sy_frames);
    if (ingest_cmd->parsed()) return cmd_ingest(g, in_threshold, in_frames, in_keep_going);
    if (perturb_cmd->parsed()) {
      if (pe_pipeline.empty() && pe_pipeline_file.empty())
        raise(Errc::invalid_params, "perturb needs --pipeline or --pipeline-file");
      return cmd_perturb(g, pe_pipeline, pe_pipeline_file);
    }
    if (run_cmd->parsed()) return cmd_run(g, run_suite_file);
    if (app.get_subcommand("report")->parsed()) return cmd_report(g);
    if (pld_cmd->parsed())
      return cmd_export_pld(g, pld_sample, pld_azimuth, pld_pipeline, pld_out);
    std::fprintf(stderr, "no subcommand given\n");
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
