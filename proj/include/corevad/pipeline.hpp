#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corevad/cleaning.hpp"
#include "corevad/config.hpp"
#include "corevad/evaluate.hpp"
#include "corevad/ingest.hpp"
#include "corevad/response_parse.hpp"
#include "corevad/synthetic.hpp"
#include "corevad/types.hpp"

namespace corevad {

inline constexpr std::string_view kVersion = "1.0.0";

/// Everything needed to score one video.
struct VideoInput {
  std::vector<SegmentResponse> responses;
  EmbeddingBundle embeddings;
  std::optional<LabelSeries> labels;
  int num_frames = 0;  // F; labels->num_frames when labelled, else response coverage

  const std::string& video_id() const { return embeddings.video_id; }
};

struct VideoResult {
  std::string video_id;
  ParsedResponses parsed;
  CleaningResult cleaned;
  ScoreSeries frame_scores;
};

VideoInput make_video_input(const SyntheticFixture& fixture);
std::vector<VideoInput> make_video_inputs(const std::vector<SyntheticFixture>& fixtures);

/// parse -> clean -> refine for one video.
VideoResult score_video(const VideoInput& input, const PipelineConfig& config);

/// Scores videos on a bounded worker pool; results keep the input order.
std::vector<VideoResult> score_videos(const std::vector<VideoInput>& inputs, const PipelineConfig& config);

/// Pooled metrics over the labelled videos. Throws Error(undefined_metric)
/// when none are labelled or the pool is single-class.
DatasetMetrics evaluate_results(const std::vector<VideoInput>& inputs, const std::vector<VideoResult>& results);

struct LoadedInputs {
  std::vector<VideoInput> videos;
  std::vector<ValidationReport> reports;
};

/// Loads and cross-validates the files named in `config`. Throws
/// Error(validation) if any report is fatal.
LoadedInputs load_inputs(const PipelineConfig& config);

/// Responses and embeddings only; labels are attached separately.
std::vector<VideoInput> load_unlabelled_inputs(const PipelineConfig& config);

/// Loads config.ground_truth and attaches labels by video id. Videos absent
/// from an XD-Violence list (which names anomalous videos only) become
/// all-normal; for other formats they stay unlabelled.
void attach_labels(std::vector<VideoInput>& videos, const PipelineConfig& config);

std::vector<ValidationReport> validate_inputs(const std::vector<VideoInput>& videos, bool labels_requested);

struct RunArtifact {
  std::map<std::string, ScoreSeries> scores;
  std::optional<DatasetMetrics> metrics;
  std::string resolved_config;
  std::string manifest;
  std::vector<ValidationReport> reports;
};

/// "frame_index,score" with one row per frame.
std::string scores_to_csv(const ScoreSeries& scores);
/// Reads a score CSV (frame_index,score[,...]); the video id is the file stem.
ScoreSeries load_scores_csv(const std::filesystem::path& path);

/// Runs the full pipeline on `config` and writes under config.out:
///   scores/<video_id>.csv, metrics.json (when labelled), config.resolved,
///   manifest.json, and plots/ when enabled.
/// Scores are written before evaluation errors are raised.
RunArtifact run_pipeline(const PipelineConfig& config);

enum class AblationPlan { cleaning_table, component_table, l_sweep };

AblationPlan parse_ablation_plan(std::string_view token);
std::string_view to_string(AblationPlan plan);

struct AblationRow {
  std::string label;
  KeyValues swept;     // the settings this row changes
  KeyValues snapshot;  // resolved config of this row
  std::vector<double> auc;  // one per dataset
  std::vector<double> ap;
  double mean_auc = 0.0;
  double mean_ap = 0.0;
};

struct AblationReport {
  AblationPlan plan = AblationPlan::cleaning_table;
  std::vector<AblationRow> rows;

  const AblationRow& row(std::string_view label) const;
  std::string to_json() const;
  std::string to_table() const;
};

/// Runs every configuration of `plan` on each dataset (for synthetic inputs:
/// one dataset per seed) with all other settings taken from `base`.
AblationReport run_ablation(const PipelineConfig& base, AblationPlan plan,
                            const std::vector<std::vector<VideoInput>>& datasets);

/// Synthetic datasets for seeds first_seed .. first_seed + count - 1.
std::vector<std::vector<VideoInput>> synthetic_datasets(const std::vector<SyntheticSpec>& specs,
                                                        std::uint64_t first_seed, std::size_t count);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace corevad
