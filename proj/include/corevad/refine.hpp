#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "corevad/cleaning.hpp"
#include "corevad/types.hpp"

namespace corevad {

/// How the context-refinement sum is indexed. `weighted` mixes every
/// segment's cleaned score by the softmax weight of its description;
/// `literal` multiplies the segment's own score by a row of weights that sums
/// to one, which reduces to the identity.
enum class ContextMode { weighted, literal };

/// `squared` uses exp(-(i-c)^2 / (2 sigma2^2)); `literal` uses
/// exp(-(i-c)^2 / (2 sigma2)).
enum class PositionMode { squared, literal };

ContextMode parse_context_mode(std::string_view token);
std::string_view to_string(ContextMode mode);
PositionMode parse_position_mode(std::string_view token);
std::string_view to_string(PositionMode mode);

struct RefineToggles {
  bool context_refine = true;
  bool smoothing = true;
  bool position_weight = true;

  bool operator==(const RefineToggles&) const = default;
};

struct RefineParams {
  double tau = 0.05;
  int kernel_radius = 9;
  double sigma1 = 5.0;
  PositionMode sigma2_mode = PositionMode::squared;
  std::optional<double> sigma2;  // nullopt: floor(F/2)
  ContextMode context_mode = ContextMode::weighted;
  RefineToggles toggles;

  /// Throws Error(invalid_argument) on tau <= 0, sigma1 <= 0,
  /// kernel_radius < 1, or sigma2 <= 0.
  void check() const;
};

/// Softmax over descriptions of cosine(vision_j, description_i) / tau, as an
/// M x M row-major matrix (row j = weights seen from segment j). Description
/// row i is `description_text` row `selected_index[i]`.
std::vector<double> context_weights(const Matrix& vision, const Matrix& description_text,
                                    std::span<const std::size_t> selected_index, double tau);

ScoreSeries visual_semantic_refine(const CleaningResult& cleaned, const EmbeddingBundle& embeddings, double tau,
                                   ContextMode mode = ContextMode::weighted);

/// Normalized Gaussian taps G(p) = exp(-p^2 / (2 sigma1^2)), p = -radius..radius.
std::vector<double> gaussian_kernel(int radius, double sigma1);

/// Convolution with the normalized kernel; the series is extended by
/// repeating its first and last values.
ScoreSeries gaussian_smooth(const ScoreSeries& scores, int kernel_radius, double sigma1);

/// Assigns each segment score to the frames of its span. Frames after the
/// last span take the last segment's value.
ScoreSeries expand_to_frames(const ScoreSeries& scores, std::span<const SegmentResponse> responses, int num_frames);

/// Weight profile w(1..F) centred on frame floor(F/2).
std::vector<double> position_weights(int num_frames, PositionMode mode, std::optional<double> sigma2);

ScoreSeries position_weight(const ScoreSeries& scores, PositionMode mode, std::optional<double> sigma2);

/// Context refine -> smooth -> expand -> position weight, skipping disabled
/// stages. Always returns frame granularity.
ScoreSeries refine_chain(const CleaningResult& cleaned, const EmbeddingBundle& embeddings, const RefineParams& params,
                         std::span<const SegmentResponse> responses, int num_frames);

}  // namespace corevad
