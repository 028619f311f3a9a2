// corevad: command-line front end for the score-refinement engine.
//
//   corevad run    --config <path> [--responses ... --embeddings ... --gt ... --out ...]
//   corevad ablate --plan {cleaning_table|component_table|l_sweep} --seeds N
//   corevad synth  --spec <path> --seed N --out <dir>
//   corevad eval   --scores <csv|dir> --gt <path>
//   corevad plot   --scores <csv> [--gt ...] --out <dir>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corevad/error.hpp"
#include "corevad/evaluate.hpp"
#include "corevad/ingest.hpp"
#include "corevad/pipeline.hpp"
#include "corevad/plot.hpp"
#include "corevad/response_parse.hpp"
#include "corevad/synthetic.hpp"

namespace fs = std::filesystem;
using namespace corevad;

namespace {

struct RunOptions {
  std::string config;
  std::string responses, embeddings, gt, gt_format, frames, out;
  std::vector<std::string> overrides;  // key=value
  std::optional<unsigned> threads;
  bool plots = false;
};

struct AblateOptions {
  std::string plan;
  std::size_t seeds = 20;
  std::uint64_t seed_base = 1;
  double flip = 0.2;
  std::string config;
  std::string spec;
  std::vector<std::string> overrides;
  std::string out;
  bool on_inputs = false;
};

struct SynthOptions {
  std::string spec;
  std::string preset;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvalOptions {
  std::string scores, gt, gt_format = "normalized", frames, out;
};

struct PlotOptions {
  std::string scores, gt, gt_format = "normalized", frames, responses, out;
};

PipelineConfig apply_overrides(PipelineConfig config, const std::vector<std::string>& overrides) {
  KeyValues kv;
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::invalid_argument, "--set expects key=value, got \"" + item + "\"");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return apply_key_values(std::move(config), kv);
}

PipelineConfig base_config(const std::string& path) { return path.empty() ? PipelineConfig{} : load_config(path); }

void print_reports(const std::vector<ValidationReport>& reports) {
  for (const auto& r : reports) {
    for (const auto& issue : r.issues) {
      std::fprintf(stderr, "%s: %s [%s] %s\n", r.video_id.c_str(),
                   issue.severity == Severity::error ? "error" : "warning", issue.code.c_str(),
                   issue.message.c_str());
    }
  }
}

int cmd_run(const RunOptions& o) {
  PipelineConfig config = base_config(o.config);
  config = apply_overrides(std::move(config), o.overrides);
  if (!o.responses.empty()) config.responses = o.responses;
  if (!o.embeddings.empty()) config.embeddings = o.embeddings;
  if (!o.gt.empty()) config.ground_truth = o.gt;
  if (!o.gt_format.empty()) config.ground_truth_format = parse_ground_truth_format(o.gt_format);
  if (!o.frames.empty()) config.frame_counts = o.frames;
  if (!o.out.empty()) config.out = o.out;
  if (o.threads) config.threads = *o.threads;
  if (o.plots) config.plots = true;

  const auto artifact = run_pipeline(config);
  print_reports(artifact.reports);
  std::printf("scored %zu video(s) -> %s\n", artifact.scores.size(), config.out.string().c_str());
  if (artifact.metrics) {
    std::printf("AUC %.4f  AP %.4f  (%zu frames, %zu anomalous)\n", artifact.metrics->auc_roc,
                artifact.metrics->average_precision, artifact.metrics->num_frames, artifact.metrics->num_positive);
  }
  return 0;
}

int cmd_ablate(const AblateOptions& o) {
  const AblationPlan plan = parse_ablation_plan(o.plan);
  PipelineConfig base = apply_overrides(base_config(o.config), o.overrides);

  std::vector<std::vector<VideoInput>> datasets;
  if (o.on_inputs) {
    auto loaded = load_inputs(base);
    print_reports(loaded.reports);
    datasets.push_back(std::move(loaded.videos));
  } else {
    if (o.seeds == 0) fail(ErrorKind::invalid_argument, "--seeds must be positive");
    std::vector<SyntheticSpec> specs;
    if (!o.spec.empty()) {
      specs = load_synthetic_specs(o.spec);
    } else {
      // Scene drift is what makes wide windows hurt.
      specs = plan == AblationPlan::l_sweep ? default_drift_specs(o.flip) : default_coherent_specs(o.flip);
    }
    datasets = synthetic_datasets(specs, o.seed_base, o.seeds);
  }

  const auto report = run_ablation(base, plan, datasets);
  std::fputs(report.to_table().c_str(), stdout);
  if (!o.out.empty()) write_text_file(o.out, report.to_json());
  return 0;
}

int cmd_synth(const SynthOptions& o) {
  std::vector<SyntheticSpec> specs;
  if (!o.spec.empty()) {
    specs = load_synthetic_specs(o.spec);
  } else if (o.preset == "coherent") {
    specs = default_coherent_specs();
  } else if (o.preset == "drift") {
    specs = default_drift_specs();
  } else {
    fail(ErrorKind::invalid_argument, "synth needs --spec or --preset {coherent|drift}");
  }
  const auto fixtures = generate_synthetic_dataset(specs, o.seed);
  write_synthetic_dataset(o.out, fixtures);
  std::printf("wrote %zu video(s) -> %s\n", fixtures.size(), o.out.c_str());
  return 0;
}

std::vector<ScoreSeries> load_score_files(const fs::path& path) {
  std::vector<ScoreSeries> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(load_scores_csv(f));
    if (out.empty()) fail(ErrorKind::io, "no score CSVs in " + path.string());
  } else {
    out.push_back(load_scores_csv(path));
  }
  return out;
}

// Frame counts default to the score lengths when no counts file is given.
FrameCounts frame_counts_for(const std::string& frames, const std::vector<ScoreSeries>& scores) {
  if (!frames.empty()) return load_frame_counts(frames);
  FrameCounts counts;
  for (const auto& s : scores) counts[s.video_id] = static_cast<int>(s.values.size());
  return counts;
}

int cmd_eval(const EvalOptions& o) {
  const auto scores = load_score_files(o.scores);
  const auto format = parse_ground_truth_format(o.gt_format);
  const auto labels = load_ground_truth(o.gt, format, frame_counts_for(o.frames, scores));
  std::map<std::string, const LabelSeries*> by_id;
  for (const auto& l : labels) by_id[l.video_id] = &l;

  std::vector<VideoEvaluation> evals;
  for (const auto& s : scores) {
    const auto it = by_id.find(s.video_id);
    if (it != by_id.end()) {
      evals.push_back({s, *it->second});
    } else if (format == GroundTruthFormat::xd_violence_txt) {
      evals.push_back({s, LabelSeries{s.video_id, static_cast<int>(s.values.size()), {}}});
    } else {
      std::fprintf(stderr, "%s: no ground truth, skipped\n", s.video_id.c_str());
    }
  }
  if (evals.empty()) fail(ErrorKind::undefined_metric, "no scored video has ground truth");
  const auto metrics = aggregate_dataset(evals);
  const auto json = metrics_to_json(metrics);
  if (!o.out.empty()) write_text_file(o.out, json);
  std::fputs(json.c_str(), stdout);
  return 0;
}

int cmd_plot(const PlotOptions& o) {
  const ScoreSeries scores = load_scores_csv(o.scores);
  std::optional<LabelSeries> labels;
  if (!o.gt.empty()) {
    const auto format = parse_ground_truth_format(o.gt_format);
    for (auto& l : load_ground_truth(o.gt, format, frame_counts_for(o.frames, {scores}))) {
      if (l.video_id == scores.video_id) labels = std::move(l);
    }
    if (!labels && format == GroundTruthFormat::xd_violence_txt) {
      labels = LabelSeries{scores.video_id, static_cast<int>(scores.values.size()), {}};
    }
    if (!labels) std::fprintf(stderr, "%s: no ground truth, plotting without shading\n", scores.video_id.c_str());
  }
  std::vector<SegmentAnnotation> notes;
  if (!o.responses.empty()) {
    const auto table = load_responses(o.responses);
    const auto it = table.find(scores.video_id);
    if (it != table.end()) {
      const auto parsed = parse_all(it->second);
      for (std::size_t j = 0; j < it->second.size(); ++j) notes.push_back({it->second[j].span(), parsed.descriptions[j]});
    }
  }
  const auto files = emit_plot_data(scores, labels ? &*labels : nullptr, notes, o.out);
  std::printf("%s\n%s\n%s\n", files.csv.c_str(), files.svg.c_str(), files.annotations.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corevad: training-free video anomaly score refinement and evaluation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "score videos from responses and embeddings");
  run_cmd->add_option("--config", run.config, "key = value config file");
  run_cmd->add_option("--responses", run.responses, "responses JSONL");
  run_cmd->add_option("--embeddings", run.embeddings, "embeddings .crvb file or directory");
  run_cmd->add_option("--gt", run.gt, "ground-truth annotations");
  run_cmd->add_option("--gt-format", run.gt_format, "normalized | ucf_crime_txt | xd_violence_txt");
  run_cmd->add_option("--frames", run.frames, "video_id F lines");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--threads", run.threads, "worker threads (0: all cores)");
  run_cmd->add_option("--set", run.overrides, "config override key=value (repeatable)");
  run_cmd->add_flag("--plots", run.plots, "also write plot data");

  AblateOptions ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "run an ablation plan");
  ablate_cmd->add_option("--plan", ablate.plan, "cleaning_table | component_table | l_sweep")->required();
  ablate_cmd->add_option("--seeds", ablate.seeds, "synthetic datasets, one per seed")->capture_default_str();
  ablate_cmd->add_option("--seed-base", ablate.seed_base, "first seed")->capture_default_str();
  ablate_cmd->add_option("--flip", ablate.flip, "decision-flip probability of the built-in fixtures")
      ->capture_default_str();
  ablate_cmd->add_option("--config", ablate.config, "base config file");
  ablate_cmd->add_option("--spec", ablate.spec, "synthetic spec JSON (default: built-in fixtures)");
  ablate_cmd->add_option("--set", ablate.overrides, "config override key=value (repeatable)");
  ablate_cmd->add_option("--out", ablate.out, "write the report as JSON");
  ablate_cmd->add_flag("--inputs", ablate.on_inputs, "ablate on the files named in --config instead");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  synth_cmd->add_option("--spec", synth.spec, "synthetic spec JSON");
  synth_cmd->add_option("--preset", synth.preset, "coherent | drift (instead of --spec)");
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output directory")->required();

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "frame-level AUC-ROC and AP of score CSVs");
  eval_cmd->add_option("--scores", eval.scores, "score CSV or directory of them")->required();
  eval_cmd->add_option("--gt", eval.gt, "ground-truth annotations")->required();
  eval_cmd->add_option("--gt-format", eval.gt_format, "normalized | ucf_crime_txt | xd_violence_txt")
      ->capture_default_str();
  eval_cmd->add_option("--frames", eval.frames, "video_id F lines (default: score lengths)");
  eval_cmd->add_option("--out", eval.out, "also write metrics JSON here");

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "CSV, SVG and annotation sidecar for one score series");
  plot_cmd->add_option("--scores", plot.scores, "score CSV")->required();
  plot_cmd->add_option("--gt", plot.gt, "ground-truth annotations");
  plot_cmd->add_option("--gt-format", plot.gt_format, "normalized | ucf_crime_txt | xd_violence_txt")
      ->capture_default_str();
  plot_cmd->add_option("--frames", plot.frames, "video_id F lines (default: score length)");
  plot_cmd->add_option("--responses", plot.responses, "responses JSONL for segment descriptions");
  plot_cmd->add_option("--out", plot.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*synth_cmd) return cmd_synth(synth);
    if (*eval_cmd) return cmd_eval(eval);
    if (*plot_cmd) return cmd_plot(plot);
  } catch (const Error& e) {
    std::fprintf(stderr, "corevad: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "corevad: %s\n", e.what());
    return exit_code(ErrorKind::io);
  }
  return 1;
}
