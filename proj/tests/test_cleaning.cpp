#include <doctest.h>

#include <random>

#include "corevad/cleaning.hpp"
#include "corevad/error.hpp"
#include "oracles.hpp"

using namespace corevad;

namespace {

Matrix from_rows(const std::vector<std::vector<float>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  return m;
}

ParsedResponses parsed_of(std::vector<int> decisions) {
  ParsedResponses p;
  for (std::size_t j = 0; j < decisions.size(); ++j) {
    p.descriptions.push_back("d" + std::to_string(j + 1));
    p.raw_decisions.push_back(decisions[j] ? Decision::anomalous : Decision::normal);
  }
  p.decisions = std::move(decisions);
  return p;
}

EmbeddingBundle bundle_of(const std::vector<std::vector<float>>& vision, const std::vector<std::vector<float>>& text) {
  EmbeddingBundle b;
  b.video_id = "v";
  b.dim = vision.front().size();
  b.vision = from_rows(vision);
  b.response_text = from_rows(text);
  b.description_text = from_rows(text);
  return b;
}

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<float> a{3, 4}, b{4, 3}, c{-3, -4};
  CHECK(cosine_similarity(std::span<const float>(a), std::span<const float>(b)) == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(cosine_similarity(std::span<const float>(a), std::span<const float>(c)) == -1.0);
  CHECK(cosine_similarity(std::span<const float>(a), std::span<const float>(a)) == 1.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal;
  for (int t = 0; t < 50; ++t) {
    std::vector<float> x(17), y(17);
    for (auto& v : x) v = normal(rng);
    for (auto& v : y) v = normal(rng);
    const double xy = cosine_similarity(std::span<const float>(x), std::span<const float>(y));
    CHECK(xy == cosine_similarity(std::span<const float>(y), std::span<const float>(x)));
    // Power-of-two scaling is exact in binary floating point.
    std::vector<float> x4 = x;
    for (auto& v : x4) v *= 4.0f;
    CHECK(cosine_similarity(std::span<const float>(x4), std::span<const float>(y)) == xy);
  }

  const std::vector<float> zero{0, 0}, three{1, 2, 3};
  CHECK_THROWS_AS(cosine_similarity(std::span<const float>(a), std::span<const float>(zero)), Error);
  CHECK_THROWS_AS(cosine_similarity(std::span<const float>(a), std::span<const float>(three)), Error);
}

TEST_CASE("lrc: a flipped segment takes its neighbour's verdict") {
  // Segment 2 is anomalous on screen but its response says normal and its
  // text embedding points elsewhere; segment 3's response matches better.
  const std::vector<std::vector<float>> vision{{1, 0, 0}, {0, 1, 0}, {0, 1, 0.1f}, {0, 0, 1}};
  const std::vector<std::vector<float>> text{{1, 0, 0}, {0.2f, 0, 1}, {0, 1, 0}, {0, 0, 1}};
  const auto parsed = parsed_of({0, 0, 1, 0});
  const auto b = bundle_of(vision, text);

  const auto r = clean_lrc(parsed, b, 1);
  CHECK(r.selected_index == std::vector<std::size_t>{0, 2, 2, 3});
  CHECK(r.decisions == std::vector<int>{0, 1, 1, 0});
  CHECK(r.descriptions[1] == "d3");

  // l = 0 is the identity, as is clean_none.
  CHECK(clean_lrc(parsed, b, 0).selected_index == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(clean_none(parsed).decisions == parsed.decisions);
}

TEST_CASE("lrc: ties prefer the nearest candidate, then the lower index") {
  // All text rows identical: every candidate ties, so j keeps itself.
  const std::vector<std::vector<float>> same{{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}};
  const std::vector<std::vector<float>> vision{{1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}};
  const auto parsed = parsed_of({0, 1, 0, 1, 0});
  CHECK(clean_lrc(parsed, bundle_of(vision, same), 2).selected_index == std::vector<std::size_t>{0, 1, 2, 3, 4});

  // j's own text is worse and both neighbours tie: the left one wins.
  const std::vector<std::vector<float>> text{{1, 0}, {0, 1}, {1, 0}};
  const std::vector<std::vector<float>> v3{{1, 0}, {1, 0}, {1, 0}};
  CHECK(clean_lrc(parsed_of({0, 1, 0}), bundle_of(v3, text), 1).selected_index[1] == 0);

  // Equal similarity at distances 1 and 2: the nearer one wins even though
  // the farther one has the lower index.
  const std::vector<std::vector<float>> t5{{1, 0}, {0, 1}, {0, 1}, {1, 0}, {0, 1}};
  const std::vector<std::vector<float>> v5{{1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}};
  CHECK(clean_lrc(parsed_of({0, 0, 0, 0, 0}), bundle_of(v5, t5), 2).selected_index[2] == 3);
}

TEST_CASE("lrc matches the exhaustive window argmax") {
  std::mt19937_64 rng(11);
  std::normal_distribution<float> normal;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const std::size_t l = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    std::vector<std::vector<float>> vision(m, std::vector<float>(5)), text(m, std::vector<float>(5));
    for (auto& row : vision)
      for (auto& x : row) x = normal(rng);
    for (auto& row : text)
      for (auto& x : row) x = normal(rng);
    // Duplicate some text rows to create exact ties.
    for (std::size_t k = 0; k + 1 < m; k += 3) text[k + 1] = text[k];
    const auto r = clean_lrc(parsed_of(std::vector<int>(m, 0)), bundle_of(vision, text), l);
    CHECK(r.selected_index == oracle::window_argmax(vision, text, l));
  }
}

TEST_CASE("global cleaning equals lrc with the widest window") {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> normal;
  const std::size_t m = 9;
  std::vector<std::vector<float>> vision(m, std::vector<float>(4)), text(m, std::vector<float>(4));
  for (auto& row : vision)
    for (auto& x : row) x = normal(rng);
  for (auto& row : text)
    for (auto& x : row) x = normal(rng);
  const auto parsed = parsed_of({0, 1, 0, 1, 1, 0, 0, 1, 0});
  const auto b = bundle_of(vision, text);
  CHECK(clean_global(parsed, b).selected_index == clean_lrc(parsed, b, m - 1).selected_index);
  CHECK(clean_global(parsed, b).selected_index == oracle::window_argmax(vision, text, m));
  CHECK(clean(parsed, b, CleaningStrategy::global, 1).selected_index == clean_global(parsed, b).selected_index);
}

TEST_CASE("cleaning rejects mismatched inputs") {
  const auto b = bundle_of({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
  CHECK_THROWS_AS(clean_lrc(parsed_of({0, 1, 0}), b, 1), Error);
  CHECK(parse_cleaning_strategy("lrc") == CleaningStrategy::lrc);
  CHECK_THROWS_AS(parse_cleaning_strategy("local"), Error);
}
