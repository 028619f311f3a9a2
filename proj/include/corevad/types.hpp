#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corevad {

// Frame and segment numbers in files are 1-based. In-memory containers are
// indexed from 0, so segment j of a video lives at position j-1.

/// Inclusive 1-based frame range.
struct FrameRange {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool operator==(const FrameRange&) const = default;
};

/// One raw generated response for one video segment.
struct SegmentResponse {
  std::string video_id;
  int segment_index = 0;  // 1-based
  int start_frame = 0;    // 1-based, inclusive
  int end_frame = 0;      // 1-based, inclusive
  std::string raw_text;

  FrameRange span() const { return {start_frame, end_frame}; }
  bool operator==(const SegmentResponse&) const = default;
};

/// Dense row-major float matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// Per-video vision, full-response-text, and description-text embeddings in
/// one joint space. Rows are stored exactly as produced (not normalized).
struct EmbeddingBundle {
  std::string video_id;
  std::size_t dim = 0;
  Matrix vision;
  Matrix response_text;
  Matrix description_text;

  std::size_t rows() const { return vision.rows; }
  bool operator==(const EmbeddingBundle&) const = default;
};

/// Per-frame binary ground truth stored as anomalous ranges.
struct LabelSeries {
  std::string video_id;
  int num_frames = 0;
  std::vector<FrameRange> anomalous_ranges;

  /// Expands to y_1..y_F (index 0 holds frame 1).
  std::vector<std::uint8_t> expand() const;
  bool operator==(const LabelSeries&) const = default;
};

enum class Granularity { segment, frame };

struct ScoreSeries {
  std::string video_id;
  Granularity granularity = Granularity::segment;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Clamped fixed-interval segmentation: ceil(F/d) spans, segment j covering
/// [(j-1)d+1, min(jd, F)].
std::vector<FrameRange> segment_spans(int num_frames, int interval);

}  // namespace corevad
