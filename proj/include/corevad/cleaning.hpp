#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corevad/response_parse.hpp"
#include "corevad/types.hpp"

namespace corevad {

/// dot(a,b) / (|a| |b|), accumulated in double. Exactly symmetric in its
/// arguments. Throws on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Cosine similarity of every row of `queries` against every row of `keys`
/// (row-major, queries.rows x keys.rows).
std::vector<double> cosine_matrix(const Matrix& queries, const Matrix& keys);

enum class CleaningStrategy { none, global, lrc };

CleaningStrategy parse_cleaning_strategy(std::string_view token);
std::string_view to_string(CleaningStrategy strategy);

struct CleaningResult {
  std::vector<std::size_t> selected_index;  // 0-based source segment per segment
  std::vector<int> decisions;
  std::vector<std::string> descriptions;
};

/// Replaces each segment's response with the candidate whose full-response
/// embedding is most cosine-similar to the segment's vision embedding. The
/// window is j-l..j+l clamped to the video. Equal similarities prefer the
/// candidate nearest to j, then the lower index.
CleaningResult clean_lrc(const ParsedResponses& parsed, const EmbeddingBundle& embeddings, std::size_t window);

/// clean_lrc with every segment of the video as a candidate.
CleaningResult clean_global(const ParsedResponses& parsed, const EmbeddingBundle& embeddings);

/// Identity selection.
CleaningResult clean_none(const ParsedResponses& parsed);

CleaningResult clean(const ParsedResponses& parsed, const EmbeddingBundle& embeddings,
                     CleaningStrategy strategy, std::size_t window);

}  // namespace corevad
