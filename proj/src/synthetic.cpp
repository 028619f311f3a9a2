#include "corevad/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <json.hpp>

#include "corevad/error.hpp"
#include "corevad/ingest.hpp"

namespace corevad {

namespace {

constexpr std::array<std::string_view, 6> kAnomalousEvents = {
    "a man assaults a woman near a parked car.",
    "two people fight and one falls to the ground.",
    "a person breaks a shop window and runs away.",
    "smoke and flames spread after an explosion.",
    "a man points a gun at the cashier.",
    "a car crashes into a pedestrian at the crossing.",
};

constexpr std::array<std::string_view, 6> kNormalEvents = {
    "pedestrians walk along the street.",
    "cars wait at a traffic light.",
    "a clerk arranges items on a shelf.",
    "people talk quietly in a hallway.",
    "an empty parking lot under street lights.",
    "a cyclist rides past a bus stop.",
};

constexpr std::array<std::string_view, 3> kUnrelated = {
    "the image shows a blue sky with clouds.",
    "a close-up of a wooden texture.",
    "a logo appears on a white background.",
};

using Vec = std::vector<double>;

Vec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(static_cast<std::size_t>(dim));
  double sq = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    sq += x * x;
  }
  const double n = std::sqrt(sq);
  for (auto& x : v) x /= n;
  return v;
}

// Weighted sum of directions plus isotropic noise whose expected norm is sigma.
Vec compose(std::mt19937_64& rng, int dim, std::initializer_list<std::pair<double, const Vec*>> parts, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma / std::sqrt(static_cast<double>(dim)));
  Vec v(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [w, dir] : parts) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * (*dir)[k];
  }
  for (auto& x : v) x += normal(rng);
  return v;
}

void store_row(Matrix& m, std::size_t row, const Vec& v) {
  auto dst = m.row(row);
  for (std::size_t k = 0; k < v.size(); ++k) dst[k] = static_cast<float>(v[k]);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_argument, std::string("synthetic: ") + name + " must lie in [0,1]");
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.video_id = j.value("video_id", s.video_id);
  s.num_frames = j.value("num_frames", s.num_frames);
  s.interval = j.value("interval", s.interval);
  s.dim = j.value("dim", s.dim);
  if (j.contains("anomalous_ranges")) {
    for (const auto& r : j.at("anomalous_ranges")) s.anomalous_ranges.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  }
  s.flip_prob = j.value("flip_prob", s.flip_prob);
  s.description_corrupt_prob = j.value("description_corrupt_prob", s.description_corrupt_prob);
  s.sigma_noise = j.value("sigma_noise", s.sigma_noise);
  s.layout = parse_scene_layout(j.value("layout", std::string(to_string(s.layout))));
  s.scene_length = j.value("scene_length", s.scene_length);
  s.scene_pool = j.value("scene_pool", s.scene_pool);
  s.vision_class_strength = j.value("vision_class_strength", s.vision_class_strength);
  s.text_class_strength = j.value("text_class_strength", s.text_class_strength);
  s.hallucinated_scene_weight = j.value("hallucinated_scene_weight", s.hallucinated_scene_weight);
  s.check();
  return s;
}

}  // namespace

SceneLayout parse_scene_layout(std::string_view token) {
  if (token == "coherent") return SceneLayout::coherent;
  if (token == "drift") return SceneLayout::drift;
  fail(ErrorKind::invalid_argument, "unknown scene layout \"" + std::string(token) + "\"");
}

std::string_view to_string(SceneLayout layout) { return layout == SceneLayout::coherent ? "coherent" : "drift"; }

void SyntheticSpec::check() const {
  if (video_id.empty()) fail(ErrorKind::invalid_argument, "synthetic: empty video_id");
  if (num_frames < 1 || interval < 1 || dim < 2) {
    fail(ErrorKind::invalid_argument, "synthetic: num_frames >= 1, interval >= 1 and dim >= 2 required");
  }
  if (scene_length < 1 || scene_pool < 1) fail(ErrorKind::invalid_argument, "synthetic: scene sizes must be >= 1");
  check_probability(flip_prob, "flip_prob");
  check_probability(description_corrupt_prob, "description_corrupt_prob");
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) {
    fail(ErrorKind::invalid_argument, "synthetic: sigma_noise must be >= 0");
  }
  LabelSeries probe{video_id, num_frames, anomalous_ranges};
  check_labels(probe);
}

SyntheticFixture generate_synthetic_fixture(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.check();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(spec.flip_prob);
  std::bernoulli_distribution corrupt(spec.description_corrupt_prob);

  SyntheticFixture fx;
  fx.labels = {spec.video_id, spec.num_frames, spec.anomalous_ranges};
  const auto frame_labels = fx.labels.expand();
  const auto spans = segment_spans(spec.num_frames, spec.interval);
  const std::size_t m = spans.size();

  for (const auto& span : spans) {
    int positives = 0;
    for (int f = span.start; f <= span.end; ++f) positives += frame_labels[static_cast<std::size_t>(f - 1)];
    fx.segment_labels.push_back(2 * positives >= span.length() ? 1 : 0);
  }

  const std::array<Vec, 2> class_dir = {random_unit(rng, spec.dim), random_unit(rng, spec.dim)};
  std::vector<Vec> pool;
  for (int k = 0; k < spec.scene_pool; ++k) pool.push_back(random_unit(rng, spec.dim));

  // Scene direction per segment.
  std::vector<Vec> scene(m);
  int run = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (spec.layout == SceneLayout::coherent) {
      const bool cut = j == 0 || run >= spec.scene_length || fx.segment_labels[j] != fx.segment_labels[j - 1];
      if (cut) {
        scene[j] = random_unit(rng, spec.dim);
        run = 0;
      } else {
        scene[j] = scene[j - 1];
      }
      ++run;
    } else {
      scene[j] = pool[(j / static_cast<std::size_t>(spec.scene_length)) % pool.size()];
    }
  }

  fx.embeddings.video_id = spec.video_id;
  fx.embeddings.dim = static_cast<std::size_t>(spec.dim);
  fx.embeddings.vision = Matrix(m, fx.embeddings.dim);
  fx.embeddings.response_text = Matrix(m, fx.embeddings.dim);
  fx.embeddings.description_text = Matrix(m, fx.embeddings.dim);

  for (std::size_t j = 0; j < m; ++j) {
    const int truth = fx.segment_labels[j];
    const bool flipped = flip(rng);
    const bool corrupted = corrupt(rng);
    const int verdict = flipped ? 1 - truth : truth;
    fx.flipped.push_back(flipped);
    fx.description_corrupted.push_back(corrupted);

    const auto& events = verdict == 1 ? kAnomalousEvents : kNormalEvents;
    std::uniform_int_distribution<std::size_t> pick(0, events.size() - 1);
    std::string description(events[pick(rng)]);
    if (corrupted) {
      std::uniform_int_distribution<std::size_t> pick_unrelated(0, kUnrelated.size() - 1);
      description = std::string(kUnrelated[pick_unrelated(rng)]);
    }
    const std::string marker = verdict == 1 ? "Anomalous scenes: " : "Normal scenes: ";
    fx.responses.push_back({spec.video_id, static_cast<int>(j) + 1, spans[j].start, spans[j].end, marker + description});

    const double scene_weight = flipped ? spec.hallucinated_scene_weight : 1.0;
    store_row(fx.embeddings.vision, j,
              compose(rng, spec.dim, {{1.0, &scene[j]}, {spec.vision_class_strength, &class_dir[truth]}},
                      spec.sigma_noise));
    store_row(fx.embeddings.response_text, j,
              compose(rng, spec.dim, {{scene_weight, &scene[j]}, {spec.text_class_strength, &class_dir[verdict]}},
                      spec.sigma_noise));
    if (corrupted) {
      const Vec unrelated = random_unit(rng, spec.dim);
      store_row(fx.embeddings.description_text, j, compose(rng, spec.dim, {{1.0, &unrelated}}, spec.sigma_noise));
    } else {
      store_row(fx.embeddings.description_text, j,
                compose(rng, spec.dim, {{scene_weight, &scene[j]}, {spec.text_class_strength, &class_dir[verdict]}},
                        spec.sigma_noise));
    }
  }
  check_bundle(fx.embeddings);
  return fx;
}

std::vector<SyntheticFixture> generate_synthetic_dataset(const std::vector<SyntheticSpec>& specs, std::uint64_t seed) {
  std::vector<SyntheticFixture> out;
  out.reserve(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    out.push_back(generate_synthetic_fixture(specs[k], (std::uint64_t{words[0]} << 32) | words[1]));
  }
  return out;
}

std::vector<SyntheticSpec> parse_synthetic_specs(std::string_view json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::validation, "synthetic spec: malformed JSON");
  std::vector<SyntheticSpec> specs;
  try {
    if (j.is_object() && j.contains("videos")) {
      for (const auto& v : j.at("videos")) specs.push_back(spec_from_json(v));
    } else {
      specs.push_back(spec_from_json(j));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("synthetic spec: ") + e.what());
  }
  if (specs.empty()) fail(ErrorKind::validation, "synthetic spec: no videos");
  return specs;
}

std::vector<SyntheticSpec> load_synthetic_specs(const std::filesystem::path& path) {
  return parse_synthetic_specs(read_text_file(path));
}

std::string synthetic_specs_to_json(const std::vector<SyntheticSpec>& specs) {
  nlohmann::ordered_json videos = nlohmann::ordered_json::array();
  for (const auto& s : specs) {
    nlohmann::ordered_json ranges = nlohmann::ordered_json::array();
    for (const auto& r : s.anomalous_ranges) ranges.push_back({r.start, r.end});
    videos.push_back({{"video_id", s.video_id},
                      {"num_frames", s.num_frames},
                      {"interval", s.interval},
                      {"dim", s.dim},
                      {"anomalous_ranges", ranges},
                      {"flip_prob", s.flip_prob},
                      {"description_corrupt_prob", s.description_corrupt_prob},
                      {"sigma_noise", s.sigma_noise},
                      {"layout", to_string(s.layout)},
                      {"scene_length", s.scene_length},
                      {"scene_pool", s.scene_pool},
                      {"vision_class_strength", s.vision_class_strength},
                      {"text_class_strength", s.text_class_strength},
                      {"hallucinated_scene_weight", s.hallucinated_scene_weight}});
  }
  nlohmann::ordered_json root;
  root["videos"] = videos;
  return root.dump(2) + "\n";
}

void write_synthetic_dataset(const std::filesystem::path& dir, const std::vector<SyntheticFixture>& fixtures) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "embeddings", ec);
  if (ec) fail(ErrorKind::io, "cannot create " + (dir / "embeddings").string() + ": " + ec.message());
  std::string responses;
  std::string gt_lines;
  for (const auto& fx : fixtures) {
    responses += format_responses(fx.responses);
    write_embeddings(dir / "embeddings" / (fx.embeddings.video_id + ".crvb"), fx.embeddings);
    nlohmann::ordered_json ranges = nlohmann::ordered_json::array();
    for (const auto& r : fx.labels.anomalous_ranges) ranges.push_back({r.start, r.end});
    nlohmann::ordered_json line = {
        {"video_id", fx.labels.video_id}, {"num_frames", fx.labels.num_frames}, {"anomalous_ranges", ranges}};
    gt_lines += line.dump() + "\n";
  }
  write_text_file(dir / "responses.jsonl", responses);
  write_text_file(dir / "ground_truth.jsonl", gt_lines);
}

namespace {

SyntheticSpec base_spec(std::string id, int frames, std::vector<FrameRange> ranges, double flip_prob) {
  SyntheticSpec s;
  s.video_id = std::move(id);
  s.num_frames = frames;
  s.anomalous_ranges = std::move(ranges);
  s.flip_prob = flip_prob;
  s.description_corrupt_prob = 0.05;
  // Weak visual class signal and noisy rows: refinement alone cannot undo
  // every flip, so the cleaning step has something to fix.
  s.sigma_noise = 1.5;
  s.vision_class_strength = 0.2;
  s.hallucinated_scene_weight = 0.0;
  s.scene_length = 6;
  return s;
}

}  // namespace

std::vector<SyntheticSpec> default_coherent_specs(double flip_prob) {
  return {
      base_spec("coherent_01", 2400, {{901, 1500}}, flip_prob),
      base_spec("coherent_02", 1800, {{211, 660}, {1291, 1560}}, flip_prob),
      base_spec("coherent_03", 3000, {{1801, 2700}}, flip_prob),
      base_spec("coherent_04", 1500, {}, flip_prob),
      base_spec("coherent_05", 2100, {{31, 420}, {1621, 2010}}, flip_prob),
      base_spec("coherent_06", 1200, {}, flip_prob),
  };
}

std::vector<SyntheticSpec> default_drift_specs(double flip_prob) {
  auto specs = default_coherent_specs(flip_prob);
  for (auto& s : specs) {
    s.video_id.replace(0, 8, "drift");
    s.layout = SceneLayout::drift;
  }
  return specs;
}

}  // namespace corevad
