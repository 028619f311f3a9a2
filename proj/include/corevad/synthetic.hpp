#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "corevad/types.hpp"

namespace corevad {

/// Scene structure of a synthetic video.
///  - coherent: a fresh scene direction every `scene_length` segments and at
///    every label change, so neighbours share content and labels.
///  - drift: the camera cycles through `scene_pool` recurring scenes in
///    chunks of `scene_length` segments regardless of labels, so distant
///    segments can look alike while carrying different labels.
enum class SceneLayout { coherent, drift };

SceneLayout parse_scene_layout(std::string_view token);
std::string_view to_string(SceneLayout layout);

struct SyntheticSpec {
  std::string video_id = "synth";
  int num_frames = 1800;
  int interval = 30;
  int dim = 64;
  std::vector<FrameRange> anomalous_ranges;

  double flip_prob = 0.0;                 // verdict flipped (hallucinated response)
  double description_corrupt_prob = 0.0;  // description replaced by unrelated text
  double sigma_noise = 0.3;               // expected norm of the Gaussian perturbation

  SceneLayout layout = SceneLayout::coherent;
  int scene_length = 4;
  int scene_pool = 3;

  double vision_class_strength = 0.5;  // weight of the event direction in vision rows
  double text_class_strength = 1.0;    // weight of the verdict direction in text rows
  double hallucinated_scene_weight = 0.2;  // scene weight kept by flipped responses

  /// Throws Error(invalid_argument) on out-of-range parameters.
  void check() const;
};

struct SyntheticFixture {
  std::vector<SegmentResponse> responses;
  EmbeddingBundle embeddings;
  LabelSeries labels;
  std::vector<int> segment_labels;  // majority label per segment
  std::vector<bool> flipped;
  std::vector<bool> description_corrupted;
};

/// Deterministic in (spec, seed).
SyntheticFixture generate_synthetic_fixture(const SyntheticSpec& spec, std::uint64_t seed);

/// One fixture per spec; video k is generated from a seed derived from
/// (seed, k).
std::vector<SyntheticFixture> generate_synthetic_dataset(const std::vector<SyntheticSpec>& specs, std::uint64_t seed);

/// Reads a JSON object (one video) or {"videos": [...]} (several).
std::vector<SyntheticSpec> parse_synthetic_specs(std::string_view json_text);
std::vector<SyntheticSpec> load_synthetic_specs(const std::filesystem::path& path);
std::string synthetic_specs_to_json(const std::vector<SyntheticSpec>& specs);

/// Writes responses.jsonl, embeddings/<video_id>.crvb and
/// ground_truth.jsonl under `dir`.
void write_synthetic_dataset(const std::filesystem::path& dir, const std::vector<SyntheticFixture>& fixtures);

/// Built-in fixture sets used by the ablation runner.
std::vector<SyntheticSpec> default_coherent_specs(double flip_prob = 0.2);
std::vector<SyntheticSpec> default_drift_specs(double flip_prob = 0.2);

}  // namespace corevad
