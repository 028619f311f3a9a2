#include "corevad/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "corevad/error.hpp"

namespace corevad {

namespace {

struct ScoreBlock {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

void check_lengths(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorKind::validation, "metric: " + std::to_string(scores.size()) + " scores for " +
                                    std::to_string(labels.size()) + " labels");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorKind::validation, "metric: non-finite score");
  }
}

// Groups frames into runs of equal score, ordered from the highest score.
std::vector<ScoreBlock> descending_blocks(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<ScoreBlock> blocks;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || scores[order[k]] != scores[order[k - 1]]) blocks.emplace_back();
    if (labels[order[k]] != 0) {
      ++blocks.back().positives;
    } else {
      ++blocks.back().negatives;
    }
  }
  return blocks;
}

std::vector<std::uint8_t> frame_labels(const ScoreSeries& scores, const LabelSeries& labels) {
  if (scores.granularity != Granularity::frame) fail(ErrorKind::validation, "metric: scores must be frame-level");
  if (static_cast<int>(scores.values.size()) != labels.num_frames) {
    fail(ErrorKind::validation, "metric: video \"" + labels.video_id + "\" has " +
                                    std::to_string(scores.values.size()) + " scores but " +
                                    std::to_string(labels.num_frames) + " labelled frames");
  }
  return labels.expand();
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_lengths(scores, labels);
  const auto blocks = descending_blocks(scores, labels);
  // Counts of pairs are integers (halves for ties); both stay exact in a double.
  double ordered = 0.0;
  double negatives_below = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    ordered += static_cast<double>(it->positives) * negatives_below;
    ordered += 0.5 * static_cast<double>(it->positives) * static_cast<double>(it->negatives);
    negatives_below += static_cast<double>(it->negatives);
    positives += it->positives;
    negatives += it->negatives;
  }
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::undefined_metric, "AUC-ROC undefined: labels contain a single class");
  }
  return ordered / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double auc_roc(const ScoreSeries& scores, const LabelSeries& labels) {
  const auto y = frame_labels(scores, labels);
  return auc_roc(scores.values, y);
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_lengths(scores, labels);
  const auto blocks = descending_blocks(scores, labels);
  std::size_t total_pos = 0;
  for (const auto& b : blocks) total_pos += b.positives;
  if (total_pos == 0) fail(ErrorKind::undefined_metric, "AP undefined: no positive labels");

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (const auto& b : blocks) {
    tp += b.positives;
    seen += b.positives + b.negatives;
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

double average_precision(const ScoreSeries& scores, const LabelSeries& labels) {
  const auto y = frame_labels(scores, labels);
  return average_precision(scores.values, y);
}

DatasetMetrics aggregate_dataset(std::span<const VideoEvaluation> videos) {
  if (videos.empty()) fail(ErrorKind::invalid_argument, "aggregate_dataset: no videos");
  DatasetMetrics out;
  std::vector<double> pooled_scores;
  std::vector<std::uint8_t> pooled_labels;
  for (const auto& v : videos) {
    const auto y = frame_labels(v.scores, v.labels);
    const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
    std::optional<VideoMetrics> per;
    if (pos > 0 && pos < y.size()) per = VideoMetrics{auc_roc(v.scores.values, y), average_precision(v.scores.values, y)};
    out.per_video[v.labels.video_id] = per;
    pooled_scores.insert(pooled_scores.end(), v.scores.values.begin(), v.scores.values.end());
    pooled_labels.insert(pooled_labels.end(), y.begin(), y.end());
  }
  out.num_frames = pooled_labels.size();
  out.num_positive = static_cast<std::size_t>(std::count(pooled_labels.begin(), pooled_labels.end(), std::uint8_t{1}));
  out.auc_roc = auc_roc(pooled_scores, pooled_labels);
  out.average_precision = average_precision(pooled_scores, pooled_labels);
  return out;
}

std::string metrics_to_json(const DatasetMetrics& metrics) {
  nlohmann::ordered_json j;
  j["auc_roc"] = metrics.auc_roc;
  j["average_precision"] = metrics.average_precision;
  j["num_frames"] = metrics.num_frames;
  j["num_positive"] = metrics.num_positive;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [id, m] : metrics.per_video) {
    if (m) {
      per[id] = {{"auc_roc", m->auc_roc}, {"average_precision", m->average_precision}};
    } else {
      per[id] = nullptr;
    }
  }
  j["per_video"] = per;
  return j.dump(2) + "\n";
}

}  // namespace corevad
