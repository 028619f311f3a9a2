#include "corevad/types.hpp"

#include <algorithm>

#include "corevad/error.hpp"

namespace corevad {

std::vector<std::uint8_t> LabelSeries::expand() const {
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(std::max(num_frames, 0)), 0);
  for (const auto& r : anomalous_ranges) {
    const int lo = std::max(r.start, 1);
    const int hi = std::min(r.end, num_frames);
    for (int f = lo; f <= hi; ++f) labels[static_cast<std::size_t>(f - 1)] = 1;
  }
  return labels;
}

std::vector<FrameRange> segment_spans(int num_frames, int interval) {
  if (num_frames < 1) fail(ErrorKind::invalid_argument, "segment_spans: num_frames must be >= 1");
  if (interval < 1) fail(ErrorKind::invalid_argument, "segment_spans: interval must be >= 1");
  std::vector<FrameRange> spans;
  spans.reserve(static_cast<std::size_t>((num_frames + interval - 1) / interval));
  for (int start = 1; start <= num_frames; start += interval) {
    spans.push_back({start, std::min(start + interval - 1, num_frames)});
  }
  return spans;
}

}  // namespace corevad
