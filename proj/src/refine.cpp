#include "corevad/refine.hpp"

#include <algorithm>
#include <cmath>

#include "corevad/error.hpp"

namespace corevad {

ContextMode parse_context_mode(std::string_view token) {
  if (token == "weighted") return ContextMode::weighted;
  if (token == "literal") return ContextMode::literal;
  fail(ErrorKind::invalid_argument, "unknown refine.eq3_mode \"" + std::string(token) + "\"");
}

std::string_view to_string(ContextMode mode) { return mode == ContextMode::weighted ? "weighted" : "literal"; }

PositionMode parse_position_mode(std::string_view token) {
  if (token == "squared") return PositionMode::squared;
  if (token == "literal") return PositionMode::literal;
  fail(ErrorKind::invalid_argument, "unknown refine.sigma2_mode \"" + std::string(token) + "\"");
}

std::string_view to_string(PositionMode mode) { return mode == PositionMode::squared ? "squared" : "literal"; }

void RefineParams::check() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::invalid_argument, "refine.tau must be > 0");
  if (kernel_radius < 1) fail(ErrorKind::invalid_argument, "refine.kernel_radius must be >= 1");
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) fail(ErrorKind::invalid_argument, "refine.sigma1 must be > 0");
  if (sigma2 && (!(*sigma2 > 0.0) || !std::isfinite(*sigma2))) {
    fail(ErrorKind::invalid_argument, "refine.sigma2 must be > 0");
  }
}

std::vector<double> context_weights(const Matrix& vision, const Matrix& description_text,
                                    std::span<const std::size_t> selected_index, double tau) {
  if (!(tau > 0.0)) fail(ErrorKind::invalid_argument, "context refinement: tau must be > 0");
  const std::size_t m = selected_index.size();
  if (m == 0) fail(ErrorKind::invalid_argument, "context refinement: no segments");
  if (vision.rows != m) fail(ErrorKind::validation, "context refinement: vision rows != segment count");

  Matrix descriptions(m, description_text.cols);
  for (std::size_t i = 0; i < m; ++i) {
    if (selected_index[i] >= description_text.rows) {
      fail(ErrorKind::validation, "context refinement: selected index out of range");
    }
    const auto src = description_text.row(selected_index[i]);
    std::copy(src.begin(), src.end(), descriptions.row(i).begin());
  }
  auto weights = cosine_matrix(vision, descriptions);
  for (std::size_t j = 0; j < m; ++j) {
    double* row = weights.data() + j * m;
    const double peak = *std::max_element(row, row + m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = std::exp((row[i] - peak) / tau);
      total += row[i];
    }
    for (std::size_t i = 0; i < m; ++i) row[i] /= total;
  }
  return weights;
}

ScoreSeries visual_semantic_refine(const CleaningResult& cleaned, const EmbeddingBundle& embeddings, double tau,
                                   ContextMode mode) {
  const std::size_t m = cleaned.decisions.size();
  if (cleaned.selected_index.size() != m) fail(ErrorKind::validation, "context refinement: malformed cleaning result");
  const auto weights = context_weights(embeddings.vision, embeddings.description_text, cleaned.selected_index, tau);
  ScoreSeries out{embeddings.video_id, Granularity::segment, std::vector<double>(m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) {
    if (mode == ContextMode::literal) {
      // sum_i y_j w_ji = y_j * sum_i w_ji, and each softmax row sums to one.
      out.values[j] = static_cast<double>(cleaned.decisions[j]);
      continue;
    }
    const double* row = weights.data() + j * m;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += cleaned.decisions[i] * row[i];
    out.values[j] = acc;
  }
  return out;
}

std::vector<double> gaussian_kernel(int radius, double sigma1) {
  if (radius < 1) fail(ErrorKind::invalid_argument, "gaussian kernel: radius must be >= 1");
  if (!(sigma1 > 0.0)) fail(ErrorKind::invalid_argument, "gaussian kernel: sigma1 must be > 0");
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int p = -radius; p <= radius; ++p) {
    const double g = std::exp(-static_cast<double>(p) * p / (2.0 * sigma1 * sigma1));
    taps[static_cast<std::size_t>(p + radius)] = g;
    total += g;
  }
  for (auto& t : taps) t /= total;
  return taps;
}

ScoreSeries gaussian_smooth(const ScoreSeries& scores, int kernel_radius, double sigma1) {
  if (scores.values.empty()) fail(ErrorKind::invalid_argument, "gaussian_smooth: empty series");
  const auto taps = gaussian_kernel(kernel_radius, sigma1);
  const auto n = static_cast<long>(scores.values.size());
  ScoreSeries out{scores.video_id, scores.granularity, std::vector<double>(scores.values.size())};
  for (long j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int p = -kernel_radius; p <= kernel_radius; ++p) {
      const long src = std::clamp(j + p, 0L, n - 1);
      acc += taps[static_cast<std::size_t>(p + kernel_radius)] * scores.values[static_cast<std::size_t>(src)];
    }
    out.values[static_cast<std::size_t>(j)] = acc;
  }
  // Rounding in the tap sum can push a flat input a few ulps off its value.
  const auto [lo, hi] = std::minmax_element(scores.values.begin(), scores.values.end());
  for (auto& v : out.values) v = std::clamp(v, *lo, *hi);
  return out;
}

ScoreSeries expand_to_frames(const ScoreSeries& scores, std::span<const SegmentResponse> responses, int num_frames) {
  if (scores.values.size() != responses.size() || responses.empty()) {
    fail(ErrorKind::validation, "expand_to_frames: " + std::to_string(scores.values.size()) + " scores for " +
                                    std::to_string(responses.size()) + " segments");
  }
  const int covered = responses.back().end_frame;
  if (num_frames < covered) {
    fail(ErrorKind::validation, "expand_to_frames: F=" + std::to_string(num_frames) +
                                    " is smaller than the last covered frame " + std::to_string(covered));
  }
  ScoreSeries out{scores.video_id, Granularity::frame, std::vector<double>(static_cast<std::size_t>(num_frames))};
  for (std::size_t j = 0; j < responses.size(); ++j) {
    for (int f = responses[j].start_frame; f <= responses[j].end_frame; ++f) {
      out.values[static_cast<std::size_t>(f - 1)] = scores.values[j];
    }
  }
  for (int f = covered + 1; f <= num_frames; ++f) out.values[static_cast<std::size_t>(f - 1)] = scores.values.back();
  return out;
}

std::vector<double> position_weights(int num_frames, PositionMode mode, std::optional<double> sigma2) {
  if (num_frames < 1) fail(ErrorKind::invalid_argument, "position weighting: F must be >= 1");
  const int center = num_frames / 2;
  // floor(F/2) is 0 for a single frame; the automatic sigma2 falls back to 1.
  const double s = sigma2 ? *sigma2 : static_cast<double>(std::max(center, 1));
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "position weighting: sigma2 must be > 0");
  const double denom = mode == PositionMode::squared ? 2.0 * s * s : 2.0 * s;
  std::vector<double> w(static_cast<std::size_t>(num_frames));
  for (int i = 1; i <= num_frames; ++i) {
    const double d = static_cast<double>(i - center);
    w[static_cast<std::size_t>(i - 1)] = std::exp(-(d * d) / denom);
  }
  return w;
}

ScoreSeries position_weight(const ScoreSeries& scores, PositionMode mode, std::optional<double> sigma2) {
  const auto w = position_weights(static_cast<int>(scores.values.size()), mode, sigma2);
  ScoreSeries out = scores;
  for (std::size_t i = 0; i < w.size(); ++i) out.values[i] *= w[i];
  return out;
}

ScoreSeries refine_chain(const CleaningResult& cleaned, const EmbeddingBundle& embeddings, const RefineParams& params,
                         std::span<const SegmentResponse> responses, int num_frames) {
  params.check();
  ScoreSeries segment{embeddings.video_id, Granularity::segment, {}};
  if (params.toggles.context_refine) {
    segment = visual_semantic_refine(cleaned, embeddings, params.tau, params.context_mode);
  } else {
    segment.values.assign(cleaned.decisions.begin(), cleaned.decisions.end());
  }
  if (params.toggles.smoothing) segment = gaussian_smooth(segment, params.kernel_radius, params.sigma1);
  auto frames = expand_to_frames(segment, responses, num_frames);
  if (params.toggles.position_weight) frames = position_weight(frames, params.sigma2_mode, params.sigma2);
  return frames;
}

}  // namespace corevad
