#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corevad/types.hpp"

namespace corevad {

/// Responses grouped per video (ordered by video_id), each group sorted by
/// segment_index.
using ResponseTable = std::map<std::string, std::vector<SegmentResponse>>;

/// Parses responses JSONL text. `source` names the input in error messages.
/// When `interval` is given, every segment except the last must span exactly
/// that many frames.
ResponseTable parse_responses(std::string_view text,
                              std::optional<int> interval = std::nullopt,
                              std::string_view source = "<memory>");
ResponseTable load_responses(const std::filesystem::path& path,
                             std::optional<int> interval = std::nullopt);

/// Serializes records as JSONL with keys in the canonical order.
std::string format_responses(std::span<const SegmentResponse> records);
void write_responses(const std::filesystem::path& path,
                     std::span<const SegmentResponse> records);

// Binary embedding container ("CRVB", version 1, little-endian).
inline constexpr char kEmbeddingMagic[4] = {'C', 'R', 'V', 'B'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;

enum class EmbeddingSection : std::uint8_t {
  vision = 0,
  response_text = 1,
  description_text = 2,
};

/// Throws Error(validation) unless the three matrices share shape M x dim,
/// dim > 0, and every row is finite with positive norm.
void check_bundle(const EmbeddingBundle& bundle);

std::vector<std::uint8_t> encode_embeddings(const EmbeddingBundle& bundle);
EmbeddingBundle decode_embeddings(std::span<const std::uint8_t> bytes);
EmbeddingBundle load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path,
                      const EmbeddingBundle& bundle);

enum class GroundTruthFormat { normalized, ucf_crime_txt, xd_violence_txt };

GroundTruthFormat parse_ground_truth_format(std::string_view token);
std::string_view to_string(GroundTruthFormat format);

/// Frame counts by video_id, needed by the text annotation formats which do
/// not carry F themselves.
using FrameCounts = std::map<std::string, int>;

/// Reads "video_id num_frames" lines (blank lines and '#' comments skipped).
FrameCounts load_frame_counts(const std::filesystem::path& path);

/// Parses ground truth. Ranges are sorted; out-of-bounds or overlapping
/// ranges are rejected. UCF-Crime -1 sentinels are dropped. For the text
/// formats, video ids are the file names with any extension removed and
/// every listed video must appear in `frame_counts`.
std::vector<LabelSeries> parse_ground_truth(std::string_view text,
                                            GroundTruthFormat format,
                                            const FrameCounts& frame_counts = {});
std::vector<LabelSeries> load_ground_truth(const std::filesystem::path& path,
                                           GroundTruthFormat format,
                                           const FrameCounts& frame_counts = {});

/// Throws Error(validation) if a LabelSeries violates its invariants.
void check_labels(const LabelSeries& labels);

enum class Severity { warning, error };

struct ValidationIssue {
  Severity severity = Severity::warning;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::string video_id;
  std::vector<ValidationIssue> issues;
  bool is_fatal = false;

  void add(Severity severity, std::string code, std::string message);
};

/// Cross-checks one video's responses, embeddings, and optional labels.
/// Problems are reported, never thrown.
ValidationReport validate_bundle(std::span<const SegmentResponse> responses,
                                 const EmbeddingBundle& embeddings,
                                 const LabelSeries* labels = nullptr);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace corevad
