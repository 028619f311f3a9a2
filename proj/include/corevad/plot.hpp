#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corevad/types.hpp"

namespace corevad {

struct SegmentAnnotation {
  FrameRange span;
  std::string description;
};

struct PlotFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
  std::filesystem::path annotations;
};

/// CSV of frame_index,score,label (label blank without ground truth).
std::string plot_csv(const ScoreSeries& scores, const LabelSeries* labels);

/// Score timeline as SVG; anomalous ground-truth ranges are shaded bands.
std::string plot_svg(const ScoreSeries& scores, const LabelSeries* labels);

/// Writes <video_id>.csv, <video_id>.svg and <video_id>.annotations.json
/// into `out_dir` (created if needed).
PlotFiles emit_plot_data(const ScoreSeries& scores, const LabelSeries* labels,
                         const std::vector<SegmentAnnotation>& segments, const std::filesystem::path& out_dir);

}  // namespace corevad
