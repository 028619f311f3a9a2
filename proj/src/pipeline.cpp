#include "corevad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "corevad/error.hpp"
#include "corevad/plot.hpp"
#include "corevad/refine.hpp"

namespace corevad {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, n));
}

// Runs job(i) for i in [0, count) on a bounded pool. The first failure (by
// index) is rethrown after every worker has finished.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = worker_count(threads, count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_report_issues(const std::vector<ValidationReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    for (const auto& issue : r.issues) {
      if (issue.severity != Severity::error) continue;
      out += "\n  " + r.video_id + ": [" + issue.code + "] " + issue.message;
    }
  }
  return out;
}

ordered_json reports_to_json(const std::vector<ValidationReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    for (const auto& issue : r.issues) {
      arr.push_back({{"video_id", r.video_id},
                     {"severity", issue.severity == Severity::error ? "error" : "warning"},
                     {"code", issue.code},
                     {"message", issue.message}});
    }
  }
  return arr;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

// --- inputs ------------------------------------------------------------------

VideoInput make_video_input(const SyntheticFixture& fixture) {
  VideoInput in;
  in.responses = fixture.responses;
  in.embeddings = fixture.embeddings;
  in.labels = fixture.labels;
  in.num_frames = fixture.labels.num_frames;
  return in;
}

std::vector<VideoInput> make_video_inputs(const std::vector<SyntheticFixture>& fixtures) {
  std::vector<VideoInput> out;
  out.reserve(fixtures.size());
  for (const auto& fx : fixtures) out.push_back(make_video_input(fx));
  return out;
}

std::vector<VideoInput> load_unlabelled_inputs(const PipelineConfig& config) {
  if (config.responses.empty()) fail(ErrorKind::invalid_argument, "no responses file configured");
  if (config.embeddings.empty()) fail(ErrorKind::invalid_argument, "no embeddings path configured");
  const auto table = load_responses(config.responses, config.interval);

  std::vector<VideoInput> videos;
  const bool directory = fs::is_directory(config.embeddings);
  std::optional<EmbeddingBundle> single;
  if (!directory) single = load_embeddings(config.embeddings);
  for (const auto& [id, responses] : table) {
    VideoInput in;
    in.responses = responses;
    if (directory) {
      const auto path = config.embeddings / (id + ".crvb");
      if (!fs::exists(path)) fail(ErrorKind::validation, "no embeddings for video \"" + id + "\" (" + path.string() + ")");
      in.embeddings = load_embeddings(path);
    } else {
      if (single->video_id != id) {
        fail(ErrorKind::validation, "embeddings file holds \"" + single->video_id + "\" but responses name \"" + id + "\"");
      }
      in.embeddings = *single;
    }
    in.num_frames = responses.back().end_frame;
    videos.push_back(std::move(in));
  }
  return videos;
}

void attach_labels(std::vector<VideoInput>& videos, const PipelineConfig& config) {
  FrameCounts counts;
  if (!config.frame_counts.empty()) {
    counts = load_frame_counts(config.frame_counts);
  }
  for (const auto& v : videos) counts.emplace(v.video_id(), v.responses.back().end_frame);
  const auto labels = load_ground_truth(config.ground_truth, config.ground_truth_format, counts);
  std::map<std::string, const LabelSeries*> by_id;
  for (const auto& l : labels) by_id[l.video_id] = &l;
  for (auto& v : videos) {
    const auto it = by_id.find(v.video_id());
    if (it != by_id.end()) {
      v.labels = *it->second;
    } else if (config.ground_truth_format == GroundTruthFormat::xd_violence_txt) {
      v.labels = LabelSeries{v.video_id(), counts.at(v.video_id()), {}};
    }
    if (v.labels) v.num_frames = v.labels->num_frames;
  }
}

std::vector<ValidationReport> validate_inputs(const std::vector<VideoInput>& videos, bool labels_requested) {
  std::vector<ValidationReport> reports;
  for (const auto& v : videos) {
    auto report = validate_bundle(v.responses, v.embeddings, v.labels ? &*v.labels : nullptr);
    if (labels_requested && !v.labels) {
      report.add(Severity::warning, "no-labels", "no ground truth for this video; excluded from metrics");
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

LoadedInputs load_inputs(const PipelineConfig& config) {
  LoadedInputs loaded;
  loaded.videos = load_unlabelled_inputs(config);
  if (!config.ground_truth.empty()) attach_labels(loaded.videos, config);
  loaded.reports = validate_inputs(loaded.videos, !config.ground_truth.empty());
  const bool fatal = std::any_of(loaded.reports.begin(), loaded.reports.end(), [](const auto& r) { return r.is_fatal; });
  if (fatal) fail(ErrorKind::validation, "input validation failed:" + format_report_issues(loaded.reports));
  return loaded;
}

// --- scoring -----------------------------------------------------------------

VideoResult score_video(const VideoInput& input, const PipelineConfig& config) {
  VideoResult r;
  r.video_id = input.video_id();
  r.parsed = parse_all(input.responses, config.fallback);
  r.cleaned = clean(r.parsed, input.embeddings, config.strategy, config.window);
  r.frame_scores = refine_chain(r.cleaned, input.embeddings, config.refine, input.responses, input.num_frames);
  r.frame_scores.video_id = r.video_id;
  return r;
}

std::vector<VideoResult> score_videos(const std::vector<VideoInput>& inputs, const PipelineConfig& config) {
  config.check();
  std::vector<VideoResult> results(inputs.size());
  parallel_for(inputs.size(), config.threads, [&](std::size_t i) { results[i] = score_video(inputs[i], config); });
  return results;
}

DatasetMetrics evaluate_results(const std::vector<VideoInput>& inputs, const std::vector<VideoResult>& results) {
  std::vector<VideoEvaluation> evals;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].labels) evals.push_back({results[i].frame_scores, *inputs[i].labels});
  }
  if (evals.empty()) fail(ErrorKind::undefined_metric, "no labelled videos to evaluate");
  return aggregate_dataset(evals);
}

// --- files -------------------------------------------------------------------

std::string scores_to_csv(const ScoreSeries& scores) {
  std::string out = "frame_index,score\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, scores.values[i]);
    out += buf;
  }
  return out;
}

ScoreSeries load_scores_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::validation, path.string() + ": empty score file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("frame_index,score", 0) != 0) {
    fail(ErrorKind::validation, path.string() + ": header must start with frame_index,score");
  }
  ScoreSeries s{path.stem().string(), Granularity::frame, {}};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(row);
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) fail(ErrorKind::validation, where + ": expected frame_index,score");
    const auto c2 = line.find(',', c1 + 1);
    try {
      const long frame = std::stol(line.substr(0, c1));
      const double score = std::stod(line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
      if (frame != static_cast<long>(s.values.size()) + 1) {
        fail(ErrorKind::validation, where + ": frame indices must run 1..F in order");
      }
      s.values.push_back(score);
    } catch (const std::logic_error&) {
      fail(ErrorKind::validation, where + ": malformed row");
    }
  }
  if (s.values.empty()) fail(ErrorKind::validation, path.string() + ": no score rows");
  return s;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_binary_file(path)); }

// --- run ---------------------------------------------------------------------

RunArtifact run_pipeline(const PipelineConfig& config) {
  config.check();
  RunArtifact artifact;
  auto videos = load_unlabelled_inputs(config);

  std::exception_ptr label_error;
  if (!config.ground_truth.empty()) {
    try {
      attach_labels(videos, config);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::io) throw;
      label_error = std::current_exception();
    }
  }
  artifact.reports = validate_inputs(videos, !config.ground_truth.empty() && !label_error);
  if (std::any_of(artifact.reports.begin(), artifact.reports.end(), [](const auto& r) { return r.is_fatal; })) {
    fail(ErrorKind::validation, "input validation failed:" + format_report_issues(artifact.reports));
  }

  const auto results = score_videos(videos, config);

  ensure_dir(config.out / "scores");
  for (const auto& r : results) {
    write_text_file(config.out / "scores" / (r.video_id + ".csv"), scores_to_csv(r.frame_scores));
    artifact.scores.emplace(r.video_id, r.frame_scores);
  }
  if (config.plots) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      std::vector<SegmentAnnotation> notes;
      for (std::size_t j = 0; j < videos[i].responses.size(); ++j) {
        notes.push_back({videos[i].responses[j].span(), results[i].cleaned.descriptions[j]});
      }
      emit_plot_data(results[i].frame_scores, videos[i].labels ? &*videos[i].labels : nullptr, notes,
                     config.out / "plots");
    }
  }

  artifact.resolved_config = format_key_values(to_key_values(config));
  write_text_file(config.out / "config.resolved", artifact.resolved_config);

  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  ordered_json inputs = ordered_json::array();
  const auto add_input = [&](const std::string& role, const fs::path& p) {
    inputs.push_back({{"role", role}, {"path", p.string()}, {"sha256", sha256_file(p)}});
  };
  add_input("responses", config.responses);
  if (fs::is_directory(config.embeddings)) {
    for (const auto& v : videos) add_input("embeddings", config.embeddings / (v.video_id() + ".crvb"));
  } else {
    add_input("embeddings", config.embeddings);
  }
  if (!config.ground_truth.empty() && !label_error) add_input("ground_truth", config.ground_truth);
  if (!config.frame_counts.empty() && !label_error) add_input("frame_counts", config.frame_counts);
  manifest["inputs"] = inputs;
  manifest["config_sha256"] = sha256_hex(std::span(
      reinterpret_cast<const std::uint8_t*>(artifact.resolved_config.data()), artifact.resolved_config.size()));
  manifest["validation"] = reports_to_json(artifact.reports);
  artifact.manifest = manifest.dump(2) + "\n";
  write_text_file(config.out / "manifest.json", artifact.manifest);

  if (label_error) std::rethrow_exception(label_error);
  if (!config.ground_truth.empty()) {
    artifact.metrics = evaluate_results(videos, results);
    write_text_file(config.out / "metrics.json", metrics_to_json(*artifact.metrics));
  }
  return artifact;
}

// --- ablation ----------------------------------------------------------------

AblationPlan parse_ablation_plan(std::string_view token) {
  if (token == "cleaning_table") return AblationPlan::cleaning_table;
  if (token == "component_table") return AblationPlan::component_table;
  if (token == "l_sweep") return AblationPlan::l_sweep;
  fail(ErrorKind::invalid_argument, "unknown ablation plan \"" + std::string(token) + "\"");
}

std::string_view to_string(AblationPlan plan) {
  switch (plan) {
    case AblationPlan::cleaning_table: return "cleaning_table";
    case AblationPlan::component_table: return "component_table";
    case AblationPlan::l_sweep: return "l_sweep";
  }
  return "cleaning_table";
}

const AblationRow& AblationReport::row(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return r;
  }
  fail(ErrorKind::invalid_argument, "ablation report has no row \"" + std::string(label) + "\"");
}

std::string AblationReport::to_json() const {
  ordered_json root;
  root["plan"] = to_string(plan);
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["label"] = r.label;
    row["swept"] = r.swept;
    row["mean_auc"] = r.mean_auc;
    row["mean_ap"] = r.mean_ap;
    row["auc"] = r.auc;
    row["ap"] = r.ap;
    row["config"] = r.snapshot;
    arr.push_back(std::move(row));
  }
  root["rows"] = arr;
  return root.dump(2) + "\n";
}

std::string AblationReport::to_table() const {
  std::string out = "plan: " + std::string(to_string(plan)) + "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-34s %10s %10s %6s\n", "configuration", "AUC(%)", "AP(%)", "runs");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-34s %10.2f %10.2f %6zu\n", r.label.c_str(), 100.0 * r.mean_auc,
                  100.0 * r.mean_ap, r.auc.size());
    out += buf;
  }
  return out;
}

AblationReport run_ablation(const PipelineConfig& base, AblationPlan plan,
                            const std::vector<std::vector<VideoInput>>& datasets) {
  if (datasets.empty()) fail(ErrorKind::invalid_argument, "ablation: no datasets");
  struct Variant {
    std::string label;
    PipelineConfig config;
  };
  std::vector<Variant> variants;
  switch (plan) {
    case AblationPlan::cleaning_table:
      for (auto s : {CleaningStrategy::none, CleaningStrategy::global, CleaningStrategy::lrc}) {
        PipelineConfig c = base;
        c.strategy = s;
        variants.push_back({std::string(to_string(s)), c});
      }
      break;
    case AblationPlan::component_table: {
      const RefineToggles rows[] = {{false, false, false}, {true, false, false}, {true, true, false}, {true, true, true}};
      for (const auto& t : rows) {
        PipelineConfig c = base;
        c.refine.toggles = t;
        std::string label = std::string("context:") + (t.context_refine ? "on" : "off") +
                            " smooth:" + (t.smoothing ? "on" : "off") + " position:" + (t.position_weight ? "on" : "off");
        variants.push_back({label, c});
      }
      break;
    }
    case AblationPlan::l_sweep: {
      std::size_t max_segments = 0;
      for (const auto& ds : datasets) {
        for (const auto& v : ds) max_segments = std::max(max_segments, v.responses.size());
      }
      for (std::size_t l = 0; l < max_segments; ++l) {
        PipelineConfig c = base;
        c.strategy = CleaningStrategy::lrc;
        c.window = l;
        variants.push_back({"l=" + std::to_string(l), c});
      }
      PipelineConfig c = base;
      c.strategy = CleaningStrategy::global;
      variants.push_back({"l=all", c});
      break;
    }
  }

  const KeyValues base_kv = to_key_values(base);
  AblationReport report;
  report.plan = plan;
  for (auto& v : variants) {
    AblationRow row;
    row.label = v.label;
    row.snapshot = to_key_values(v.config);
    for (const auto& [k, value] : row.snapshot) {
      if (base_kv.at(k) != value) row.swept[k] = value;
    }
    row.auc.resize(datasets.size());
    row.ap.resize(datasets.size());
    PipelineConfig serial = v.config;
    serial.threads = 1;
    parallel_for(datasets.size(), v.config.threads, [&](std::size_t d) {
      const auto results = score_videos(datasets[d], serial);
      const auto metrics = evaluate_results(datasets[d], results);
      row.auc[d] = metrics.auc_roc;
      row.ap[d] = metrics.average_precision;
    });
    row.mean_auc = std::accumulate(row.auc.begin(), row.auc.end(), 0.0) / static_cast<double>(row.auc.size());
    row.mean_ap = std::accumulate(row.ap.begin(), row.ap.end(), 0.0) / static_cast<double>(row.ap.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<std::vector<VideoInput>> synthetic_datasets(const std::vector<SyntheticSpec>& specs,
                                                        std::uint64_t first_seed, std::size_t count) {
  std::vector<std::vector<VideoInput>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(make_video_inputs(generate_synthetic_dataset(specs, first_seed + k)));
  }
  return out;
}

}  // namespace corevad
