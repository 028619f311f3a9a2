#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "corevad/cleaning.hpp"
#include "corevad/ingest.hpp"
#include "corevad/refine.hpp"
#include "corevad/response_parse.hpp"

namespace corevad {

/// Every knob of a run. Defaults are the reference hyperparameters
/// (d=30, n=8, l=1, tau=0.05, radius 9, sigma1=5, sigma2=floor(F/2)).
struct PipelineConfig {
  int interval = 30;           // d: frames per segment
  int frames_per_segment = 8;  // n: frames sampled by the extractor (recorded only)
  Fallback fallback = Fallback::treat_normal;
  CleaningStrategy strategy = CleaningStrategy::lrc;
  std::size_t window = 1;  // l
  RefineParams refine;

  std::filesystem::path responses;
  std::filesystem::path embeddings;  // a .crvb file or a directory of <video_id>.crvb
  std::filesystem::path ground_truth;
  GroundTruthFormat ground_truth_format = GroundTruthFormat::normalized;
  std::filesystem::path frame_counts;
  std::filesystem::path out = "corevad_out";

  unsigned threads = 0;  // 0: hardware concurrency
  std::uint64_t seed = 0;
  bool plots = false;

  void check() const;
};

/// Flat "key = value" view of a configuration, ordered by key.
using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; lines starting with '#' and blank lines are
/// skipped.
KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& kv);

/// Applies recognised keys on top of `base`; unknown keys are an error.
PipelineConfig apply_key_values(PipelineConfig base, const KeyValues& kv);
KeyValues to_key_values(const PipelineConfig& config);

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace corevad
