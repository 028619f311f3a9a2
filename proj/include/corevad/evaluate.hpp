#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corevad/types.hpp"

namespace corevad {

/// Mann-Whitney AUC: (ordered pairs + half the tied pairs) / (P * N).
/// Throws Error(undefined_metric) unless both classes are present.
double auc_roc(std::span<const double> scores, std::span<const std::uint8_t> labels);
double auc_roc(const ScoreSeries& scores, const LabelSeries& labels);

/// Step-wise AP, sum_k (R_k - R_{k-1}) P_k over descending score thresholds,
/// with equal scores forming one threshold. Throws Error(undefined_metric)
/// without positives.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);
double average_precision(const ScoreSeries& scores, const LabelSeries& labels);

struct VideoMetrics {
  double auc_roc = 0.0;
  double average_precision = 0.0;
};

struct DatasetMetrics {
  double auc_roc = 0.0;
  double average_precision = 0.0;
  std::size_t num_frames = 0;
  std::size_t num_positive = 0;
  /// Absent (nullopt) for videos with a single class.
  std::map<std::string, std::optional<VideoMetrics>> per_video;
};

struct VideoEvaluation {
  ScoreSeries scores;
  LabelSeries labels;
};

/// Pools the frames of all videos and computes both metrics once.
DatasetMetrics aggregate_dataset(std::span<const VideoEvaluation> videos);

/// JSON report with keys auc_roc, average_precision, num_frames,
/// num_positive, per_video (null entries for single-class videos).
std::string metrics_to_json(const DatasetMetrics& metrics);

}  // namespace corevad
