#include <doctest.h>

#include <filesystem>
#include <set>

#include "corevad/config.hpp"
#include "corevad/error.hpp"
#include "corevad/ingest.hpp"
#include "corevad/pipeline.hpp"
#include "corevad/plot.hpp"
#include "corevad/synthetic.hpp"

using namespace corevad;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("corevad_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<SyntheticSpec> tiny_specs() {
  SyntheticSpec a;
  a.video_id = "alpha";
  a.num_frames = 905;
  a.dim = 16;
  a.anomalous_ranges = {{301, 600}};
  a.flip_prob = 0.2;
  SyntheticSpec b = a;
  b.video_id = "beta";
  b.num_frames = 600;
  b.anomalous_ranges = {};
  return {a, b};
}

PipelineConfig dataset_config(const fs::path& dir) {
  write_synthetic_dataset(dir / "data", generate_synthetic_dataset(tiny_specs(), 77));
  PipelineConfig c;
  c.responses = dir / "data" / "responses.jsonl";
  c.embeddings = dir / "data" / "embeddings";
  c.ground_truth = dir / "data" / "ground_truth.jsonl";
  c.out = dir / "out";
  return c;
}

ErrorKind error_kind(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("config: key-value round trip") {
  PipelineConfig c;
  c.interval = 16;
  c.strategy = CleaningStrategy::global;
  c.window = 3;
  c.refine.tau = 0.1;
  c.refine.sigma2 = 250.5;
  c.refine.toggles.smoothing = false;
  c.responses = "/data/a b/responses.jsonl";
  c.ground_truth_format = GroundTruthFormat::xd_violence_txt;
  c.plots = true;
  const auto text = format_key_values(to_key_values(c));
  const auto back = apply_key_values(PipelineConfig{}, parse_key_values(text));
  CHECK(format_key_values(to_key_values(back)) == text);
  CHECK(back.refine.sigma2 == 250.5);
  CHECK(back.responses == c.responses);
}

TEST_CASE("config: parsing rules") {
  const auto kv = parse_key_values("# comment\n\n d = 15 \nclean.strategy=none\npaths.gt = /x/Bad#1.txt\n");
  CHECK(kv.at("d") == "15");
  CHECK(kv.at("clean.strategy") == "none");
  CHECK(kv.at("paths.gt") == "/x/Bad#1.txt");
  const auto c = apply_key_values(PipelineConfig{}, kv);
  CHECK(c.interval == 15);
  CHECK(c.strategy == CleaningStrategy::none);
  CHECK(apply_key_values(PipelineConfig{}, {{"refine.sigma2", "auto"}}).refine.sigma2 == std::nullopt);

  CHECK(error_kind([] { parse_key_values("no equals sign\n"); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { apply_key_values(PipelineConfig{}, {{"refine.bogus", "1"}}); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { apply_key_values(PipelineConfig{}, {{"refine.tau", "fast"}}); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { apply_key_values(PipelineConfig{}, {{"refine.tau", "-1"}}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("plot data") {
  const auto dir = temp_dir("plot");
  ScoreSeries s{"clip", Granularity::frame, std::vector<double>(100, 0.25)};
  const LabelSeries labels{"clip", 100, {{30, 60}}};

  const auto csv = plot_csv(s, &labels);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
  CHECK(csv.rfind("frame_index,score,label\n1,0.25,0\n", 0) == 0);
  CHECK(csv.find("\n30,0.25,1\n") != std::string::npos);

  const auto bare = plot_csv(s, nullptr);
  CHECK(bare.find("\n1,0.25,\n") != std::string::npos);

  const auto svg = plot_svg(s, &labels);
  CHECK(svg.find("class=\"gt\" data-start=\"30\" data-end=\"60\"") != std::string::npos);
  CHECK(plot_svg(s, nullptr).find("class=\"gt\"") == std::string::npos);

  const auto files = emit_plot_data(s, &labels, {{{1, 50}, "people walk"}, {{51, 100}, "a fight"}}, dir / "p");
  CHECK(fs::exists(files.csv));
  CHECK(fs::exists(files.svg));
  const auto notes = read_text_file(files.annotations);
  CHECK(notes.find("\"description\": \"a fight\"") != std::string::npos);
  CHECK(notes.find("\"mean_score\": 0.25") != std::string::npos);
}

TEST_CASE("score CSV round trip") {
  const auto dir = temp_dir("csv");
  ScoreSeries s{"vid", Granularity::frame, {0.1, 1.0 / 3.0, 2e-300, 0.0}};
  write_text_file(dir / "vid.csv", scores_to_csv(s));
  const auto back = load_scores_csv(dir / "vid.csv");
  CHECK(back.video_id == "vid");
  CHECK(back.values == s.values);
  write_text_file(dir / "bad.csv", "frame_index,score\n2,0.5\n");
  CHECK(error_kind([&] { load_scores_csv(dir / "bad.csv"); }) == ErrorKind::validation);
}

TEST_CASE("pipeline: end-to-end run writes scores, metrics, config and manifest") {
  const auto dir = temp_dir("run");
  auto config = dataset_config(dir);
  config.plots = true;
  const auto artifact = run_pipeline(config);
  REQUIRE(artifact.metrics.has_value());
  CHECK(artifact.metrics->num_frames == 905 + 600);
  CHECK(artifact.metrics->auc_roc > 0.8);
  CHECK(fs::exists(config.out / "scores" / "alpha.csv"));
  CHECK(fs::exists(config.out / "metrics.json"));
  CHECK(fs::exists(config.out / "plots" / "beta.svg"));
  CHECK(load_scores_csv(config.out / "scores" / "alpha.csv").values.size() == 905);

  // The resolved config reproduces the run.
  const auto resolved = load_config(config.out / "config.resolved");
  CHECK(format_key_values(to_key_values(resolved)) == artifact.resolved_config);
  const auto manifest = read_text_file(config.out / "manifest.json");
  CHECK(manifest.find(sha256_file(config.responses)) != std::string::npos);
  CHECK(manifest.find("\"version\": \"1.0.0\"") != std::string::npos);
}

TEST_CASE("pipeline: repeated runs are byte-identical, regardless of thread count") {
  const auto dir = temp_dir("det");
  auto config = dataset_config(dir);
  config.out = dir / "one";
  config.threads = 1;
  run_pipeline(config);
  config.out = dir / "two";
  config.threads = 4;
  run_pipeline(config);
  for (const auto* name : {"scores/alpha.csv", "scores/beta.csv", "metrics.json"}) {
    CHECK(read_binary_file(dir / "one" / name) == read_binary_file(dir / "two" / name));
  }
}

TEST_CASE("pipeline: without ground truth scores are written and metrics are absent") {
  const auto dir = temp_dir("nogt");
  auto config = dataset_config(dir);
  config.ground_truth.clear();
  const auto artifact = run_pipeline(config);
  CHECK_FALSE(artifact.metrics.has_value());
  CHECK(fs::exists(config.out / "scores" / "beta.csv"));
  CHECK_FALSE(fs::exists(config.out / "metrics.json"));
}

TEST_CASE("pipeline: a missing ground-truth file is an I/O error after scores are written") {
  const auto dir = temp_dir("gtio");
  auto config = dataset_config(dir);
  config.ground_truth = dir / "missing.jsonl";
  CHECK(error_kind([&] { run_pipeline(config); }) == ErrorKind::io);
  CHECK(fs::exists(config.out / "scores" / "alpha.csv"));
}

TEST_CASE("pipeline: fatal validation stops the run") {
  const auto dir = temp_dir("fatal");
  auto config = dataset_config(dir);
  // Replace one bundle with a one-row file for the same video.
  auto emb = load_embeddings(config.embeddings / "beta.crvb");
  for (auto* m : {&emb.vision, &emb.response_text, &emb.description_text}) {
    m->rows = 1;
    m->data.resize(m->cols);
  }
  write_embeddings(config.embeddings / "beta.crvb", emb);
  CHECK(error_kind([&] { run_pipeline(config); }) == ErrorKind::validation);
}

TEST_CASE("pipeline: single-class pool is an undefined metric") {
  const auto dir = temp_dir("oneclass");
  auto specs = tiny_specs();
  specs[0].anomalous_ranges.clear();
  write_synthetic_dataset(dir / "data", generate_synthetic_dataset(specs, 1));
  PipelineConfig c;
  c.responses = dir / "data" / "responses.jsonl";
  c.embeddings = dir / "data" / "embeddings";
  c.ground_truth = dir / "data" / "ground_truth.jsonl";
  c.out = dir / "out";
  CHECK(error_kind([&] { run_pipeline(c); }) == ErrorKind::undefined_metric);
  CHECK(fs::exists(c.out / "scores" / "alpha.csv"));
}

TEST_CASE("score_videos keeps input order") {
  const auto inputs = make_video_inputs(generate_synthetic_dataset(tiny_specs(), 3));
  PipelineConfig c;
  c.threads = 3;
  const auto results = score_videos(inputs, c);
  REQUIRE(results.size() == 2);
  CHECK(results[0].video_id == "alpha");
  CHECK(results[1].video_id == "beta");
  CHECK(results[0].frame_scores.values.size() == 905);
}

TEST_CASE("ablation: rows differ from the base only in the swept setting") {
  const auto datasets = synthetic_datasets(tiny_specs(), 1, 2);
  PipelineConfig base;
  base.threads = 2;

  const auto cleaning = run_ablation(base, AblationPlan::cleaning_table, datasets);
  REQUIRE(cleaning.rows.size() == 3);
  CHECK(cleaning.rows[0].label == "none");
  for (const auto& row : cleaning.rows) {
    CHECK(row.auc.size() == 2);
    for (const auto& [k, v] : row.swept) CHECK(k == "clean.strategy");
  }
  CHECK(cleaning.row("lrc").swept.empty());  // lrc is the base setting

  const auto components = run_ablation(base, AblationPlan::component_table, datasets);
  REQUIRE(components.rows.size() == 4);
  const std::set<std::string> toggles{"refine.toggles.context_refine", "refine.toggles.smoothing",
                                      "refine.toggles.position_weight"};
  for (const auto& row : components.rows)
    for (const auto& [k, v] : row.swept) CHECK(toggles.count(k) == 1);
  CHECK(components.rows.back().swept.empty());

  const auto sweep = run_ablation(base, AblationPlan::l_sweep, datasets);
  // 31 segments in the longest video: l = 0..30, then all
  REQUIRE(sweep.rows.size() == 32);
  CHECK(sweep.rows.front().label == "l=0");
  CHECK(sweep.rows.back().label == "l=all");
  CHECK(sweep.row("l=all").swept.at("clean.strategy") == "global");
  for (const auto& row : sweep.rows)
    for (const auto& [k, v] : row.swept) CHECK((k == "clean.l" || k == "clean.strategy"));

  // Global cleaning equals lrc with a window spanning every video.
  CHECK(sweep.row("l=all").auc == sweep.row("l=30").auc);

  CHECK(cleaning.to_json().find("\"plan\": \"cleaning_table\"") != std::string::npos);
  CHECK(parse_ablation_plan("l_sweep") == AblationPlan::l_sweep);
  CHECK_THROWS_AS(parse_ablation_plan("table5"), Error);
}

TEST_CASE("sha256") {
  const std::string abc = "abc";
  CHECK(sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
