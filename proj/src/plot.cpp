#include "corevad/plot.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "corevad/error.hpp"
#include "corevad/ingest.hpp"

namespace corevad {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 240.0;
constexpr double kMargin = 32.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string plot_csv(const ScoreSeries& scores, const LabelSeries* labels) {
  std::vector<std::uint8_t> y;
  if (labels) {
    y = labels->expand();
    if (y.size() != scores.values.size()) fail(ErrorKind::validation, "plot: labels and scores differ in length");
  }
  std::string out = "frame_index,score,label\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,", i + 1, scores.values[i]);
    out += buf;
    if (labels) out += y[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string plot_svg(const ScoreSeries& scores, const LabelSeries* labels) {
  const std::size_t n = scores.values.size();
  if (n == 0) fail(ErrorKind::invalid_argument, "plot: empty series");
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const double step = n > 1 ? plot_w / static_cast<double>(n - 1) : 0.0;
  const auto x_of = [&](double frame) { return kMargin + (frame - 1.0) * step; };
  const auto y_of = [&](double score) { return kMargin + (1.0 - std::clamp(score, 0.0, 1.0)) * plot_h; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<title>" + scores.video_id + "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
  if (labels) {
    for (const auto& r : labels->anomalous_ranges) {
      const double x0 = x_of(r.start);
      const double x1 = std::max(x_of(r.end), x0 + 1.0);
      svg += "<rect class=\"gt\" data-start=\"" + std::to_string(r.start) + "\" data-end=\"" + std::to_string(r.end) +
             "\" x=\"" + num(x0) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
             num(plot_h) + "\" fill=\"#f9c6d0\"/>\n";
    }
  }
  svg += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin + plot_h) + "\" x2=\"" + num(kMargin + plot_w) +
         "\" y2=\"" + num(kMargin + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" +
         num(kMargin + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<polyline class=\"score\" fill=\"none\" stroke=\"#1f4e9e\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) svg += ' ';
    svg += num(x_of(static_cast<double>(i + 1))) + "," + num(y_of(scores.values[i]));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

PlotFiles emit_plot_data(const ScoreSeries& scores, const LabelSeries* labels,
                         const std::vector<SegmentAnnotation>& segments, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + out_dir.string() + ": " + ec.message());
  const std::string stem = scores.video_id.empty() ? "scores" : scores.video_id;
  PlotFiles files{out_dir / (stem + ".csv"), out_dir / (stem + ".svg"), out_dir / (stem + ".annotations.json")};

  write_text_file(files.csv, plot_csv(scores, labels));
  write_text_file(files.svg, plot_svg(scores, labels));

  nlohmann::ordered_json notes = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    double mean = 0.0;
    int count = 0;
    for (int f = s.span.start; f <= s.span.end && f <= static_cast<int>(scores.values.size()); ++f) {
      mean += scores.values[static_cast<std::size_t>(f - 1)];
      ++count;
    }
    notes.push_back({{"segment_index", k + 1},
                     {"start_frame", s.span.start},
                     {"end_frame", s.span.end},
                     {"mean_score", count ? mean / count : 0.0},
                     {"description", s.description}});
  }
  nlohmann::ordered_json root;
  root["video_id"] = scores.video_id;
  root["segments"] = notes;
  write_text_file(files.annotations, root.dump(2) + "\n");
  return files;
}

}  // namespace corevad
