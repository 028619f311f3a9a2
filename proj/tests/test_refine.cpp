#include <doctest.h>

#include <cmath>
#include <random>

#include "corevad/error.hpp"
#include "corevad/refine.hpp"
#include "oracles.hpp"

using namespace corevad;

namespace {

// Independently computed reference values.
constexpr double kExpMinusHalf = 0.6065306597126334;
// exp(-p^2/50) / sum_{q=-9..9} exp(-q^2/50), p = 0..9
constexpr double kKernelR9S5[10] = {0.08461290206680983, 0.0829374543505214,   0.07810755301308371,
                                    0.07067463659746549, 0.061441577359824466, 0.051320319310782604,
                                    0.04118552096433983, 0.031756161251700256, 0.023525542874166295,
                                    0.016744783244710956};

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<float> normal;
  Matrix m(rows, cols);
  for (auto& x : m.data) x = normal(rng);
  return m;
}

std::vector<SegmentResponse> spans_for(int frames, int d) {
  std::vector<SegmentResponse> out;
  int j = 1;
  for (const auto& s : segment_spans(frames, d)) out.push_back({"v", j++, s.start, s.end, ""});
  return out;
}

}  // namespace

TEST_CASE("gaussian kernel: normalized taps match reference values") {
  const auto k = gaussian_kernel(9, 5.0);
  REQUIRE(k.size() == 19);
  double total = 0.0;
  for (double t : k) total += t;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  for (int p = 0; p <= 9; ++p) {
    CHECK(k[9 + p] == doctest::Approx(kKernelR9S5[p]).epsilon(1e-14));
    CHECK(k[9 - p] == k[9 + p]);
  }
  CHECK_THROWS_AS(gaussian_kernel(0, 5.0), Error);
  CHECK_THROWS_AS(gaussian_kernel(3, 0.0), Error);
}

TEST_CASE("smoothing: radius 1 impulse") {
  // centre 1/(1+2e^{-1/50}), sides e^{-1/50}/(1+2e^{-1/50})
  const ScoreSeries s{"v", Granularity::segment, {0, 0, 1, 0, 0}};
  const auto out = gaussian_smooth(s, 1, 5.0);
  CHECK(out.values[2] == doctest::Approx(0.3377924930056874).epsilon(1e-15));
  CHECK(out.values[1] == doctest::Approx(0.33110375349715626).epsilon(1e-15));
  CHECK(out.values[3] == out.values[1]);
  CHECK(out.values[0] == 0.0);
}

TEST_CASE("smoothing: constant preserved, impulse gives the kernel, bounded output") {
  const ScoreSeries flat{"v", Granularity::segment, std::vector<double>(40, 0.37)};
  CHECK(gaussian_smooth(flat, 9, 5.0).values == flat.values);

  std::vector<double> impulse(41, 0.0);
  impulse[20] = 1.0;
  const auto out = gaussian_smooth({"v", Granularity::segment, impulse}, 9, 5.0);
  for (int p = -9; p <= 9; ++p) CHECK(out.values[20 + p] == doctest::Approx(kKernelR9S5[std::abs(p)]).epsilon(1e-12));
  CHECK(out.values[10] == 0.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> x(std::uniform_int_distribution<int>(1, 60)(rng));
    for (auto& v : x) v = u(rng);
    const auto y = gaussian_smooth({"v", Granularity::segment, x}, 9, 5.0).values;
    const auto ref = oracle::smooth(x, 9, 5.0);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(y[i] >= *lo);
      CHECK(y[i] <= *hi);
      CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("position weights") {
  const auto w = position_weights(100, PositionMode::squared, std::nullopt);
  // centre frame is floor(F/2) = 50, stored at index 49
  CHECK(w[49] == 1.0);
  CHECK(w[99] == doctest::Approx(kExpMinusHalf).epsilon(1e-12));  // distance 50 = sigma2
  CHECK(w[0] == doctest::Approx(std::exp(-49.0 * 49.0 / 5000.0)).epsilon(1e-14));
  for (int i = 0; i < 49; ++i) CHECK(w[i] < w[i + 1]);
  for (int i = 49; i < 99; ++i) CHECK(w[i] > w[i + 1]);

  const auto lit = position_weights(2000, PositionMode::literal, 1000.0);
  CHECK(lit[999] == 1.0);
  CHECK(lit[0] < 1e-100);
  CHECK(lit[1999] < 1e-100);

  const auto one = position_weights(1, PositionMode::squared, std::nullopt);
  CHECK(one[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));  // c = 0, sigma2 falls back to 1

  const ScoreSeries s{"v", Granularity::frame, std::vector<double>(10, 2.0)};
  const auto weighted = position_weight(s, PositionMode::squared, 3.0);
  CHECK(weighted.values[4] == 2.0);
  CHECK(weighted.values[9] == doctest::Approx(2.0 * std::exp(-25.0 / 18.0)).epsilon(1e-15));
}

TEST_CASE("context weights: rows are softmax distributions") {
  std::mt19937_64 rng(21);
  const auto vision = random_matrix(rng, 7, 6);
  const auto desc = random_matrix(rng, 7, 6);
  const std::vector<std::size_t> sel{0, 1, 1, 3, 4, 6, 6};
  const auto w = context_weights(vision, desc, sel, 0.05);
  for (std::size_t j = 0; j < 7; ++j) {
    std::vector<double> sims;
    for (std::size_t i = 0; i < 7; ++i) {
      const auto v = vision.row(j);
      const auto d = desc.row(sel[i]);
      sims.push_back(oracle::cosine({v.begin(), v.end()}, {d.begin(), d.end()}));
    }
    const auto ref = oracle::softmax(sims, 0.05);
    double total = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(w[j * 7 + i] == doctest::Approx(ref[i]).epsilon(1e-12));
      total += w[j * 7 + i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("context refine: weighted mixes, literal is the identity") {
  std::mt19937_64 rng(4);
  EmbeddingBundle b{"v", 8, random_matrix(rng, 6, 8), random_matrix(rng, 6, 8), random_matrix(rng, 6, 8)};
  CleaningResult c{{0, 1, 2, 3, 4, 5}, {0, 1, 1, 0, 1, 0}, std::vector<std::string>(6)};
  const auto weighted = visual_semantic_refine(c, b, 0.05, ContextMode::weighted);
  for (double r : weighted.values) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  const auto literal = visual_semantic_refine(c, b, 0.05, ContextMode::literal);
  CHECK(literal.values == std::vector<double>{0, 1, 1, 0, 1, 0});

  // Very low temperature: each segment takes the score of its most similar description.
  const auto sharp = visual_semantic_refine(c, b, 1e-6, ContextMode::weighted);
  for (std::size_t j = 0; j < 6; ++j) {
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const auto v = b.vision.row(j);
      const auto d = b.description_text.row(i);
      const double s = oracle::cosine({v.begin(), v.end()}, {d.begin(), d.end()});
      if (s > best_sim) best_sim = s, best = i;
    }
    CHECK(sharp.values[j] == doctest::Approx(c.decisions[best]).epsilon(1e-6));
  }
  CHECK_THROWS_AS(visual_semantic_refine(c, b, 0.0), Error);
}

TEST_CASE("context refine is equivariant to relabelling segments") {
  std::mt19937_64 rng(12);
  const std::size_t m = 9;
  EmbeddingBundle b{"v", 5, random_matrix(rng, m, 5), random_matrix(rng, m, 5), random_matrix(rng, m, 5)};
  CleaningResult c{{0, 1, 2, 3, 4, 5, 6, 7, 8}, {1, 0, 0, 1, 1, 0, 1, 0, 0}, std::vector<std::string>(m)};
  const auto rho = visual_semantic_refine(c, b, 0.05).values;

  std::vector<std::size_t> perm{4, 2, 8, 0, 7, 1, 5, 3, 6};
  EmbeddingBundle pb{"v", 5, Matrix(m, 5), Matrix(m, 5), Matrix(m, 5)};
  CleaningResult pc{std::vector<std::size_t>(m), std::vector<int>(m), std::vector<std::string>(m)};
  for (std::size_t k = 0; k < m; ++k) {
    std::copy(b.vision.row(perm[k]).begin(), b.vision.row(perm[k]).end(), pb.vision.row(k).begin());
    std::copy(b.description_text.row(perm[k]).begin(), b.description_text.row(perm[k]).end(),
              pb.description_text.row(k).begin());
    pc.selected_index[k] = k;
    pc.decisions[k] = c.decisions[perm[k]];
  }
  const auto prho = visual_semantic_refine(pc, pb, 0.05).values;
  for (std::size_t k = 0; k < m; ++k) CHECK(prho[k] == doctest::Approx(rho[perm[k]]).epsilon(1e-14));
}

TEST_CASE("position weighting is multiplicative") {
  const ScoreSeries s{"v", Granularity::frame, {0.1, 0.5, 0.9, 0.3, 0.7}};
  ScoreSeries twice = s;
  for (auto& v : twice.values) v *= 2.0;
  const auto a = position_weight(s, PositionMode::squared, std::nullopt).values;
  const auto b = position_weight(twice, PositionMode::squared, std::nullopt).values;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == 2.0 * a[i]);
}

TEST_CASE("expand to frames") {
  const auto rs = spans_for(65, 30);  // spans 1-30, 31-60, 61-65
  const ScoreSeries seg{"v", Granularity::segment, {0.1, 0.5, 0.9}};
  const auto f = expand_to_frames(seg, rs, 65);
  REQUIRE(f.values.size() == 65);
  CHECK(f.granularity == Granularity::frame);
  CHECK(f.values[0] == 0.1);
  CHECK(f.values[29] == 0.1);
  CHECK(f.values[30] == 0.5);
  CHECK(f.values[64] == 0.9);

  // Trailing frames beyond the last span inherit its score.
  const auto rs2 = spans_for(60, 30);
  const auto g = expand_to_frames({"v", Granularity::segment, {0.2, 0.7}}, rs2, 62);
  CHECK(g.values[61] == 0.7);
  CHECK_THROWS_AS(expand_to_frames({"v", Granularity::segment, {0.2, 0.7}}, rs2, 59), Error);
  CHECK_THROWS_AS(expand_to_frames({"v", Granularity::segment, {0.2}}, rs2, 60), Error);
}

TEST_CASE("refine chain honours toggles") {
  std::mt19937_64 rng(8);
  const auto rs = spans_for(300, 30);
  EmbeddingBundle b{"v", 4, random_matrix(rng, 10, 4), random_matrix(rng, 10, 4), random_matrix(rng, 10, 4)};
  CleaningResult c;
  for (std::size_t j = 0; j < 10; ++j) c.selected_index.push_back(j);
  c.decisions = {0, 0, 0, 1, 1, 1, 0, 0, 0, 0};
  c.descriptions.resize(10);

  RefineParams off;
  off.toggles = {false, false, false};
  const auto raw = refine_chain(c, b, off, rs, 300);
  CHECK(raw.values[0] == 0.0);
  CHECK(raw.values[100] == 1.0);

  RefineParams smooth_only = off;
  smooth_only.toggles.smoothing = true;
  const auto sm = refine_chain(c, b, smooth_only, rs, 300);
  const auto ref = oracle::smooth({0, 0, 0, 1, 1, 1, 0, 0, 0, 0}, 9, 5.0);
  CHECK(sm.values[0] == doctest::Approx(ref[0]).epsilon(1e-12));
  CHECK(sm.values[299] == doctest::Approx(ref[9]).epsilon(1e-12));

  RefineParams all;
  const auto full = refine_chain(c, b, all, rs, 300);
  CHECK(full.values.size() == 300);
  for (double v : full.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("refine parameter checks and mode names") {
  RefineParams p;
  CHECK_NOTHROW(p.check());
  p.tau = 0.0;
  CHECK_THROWS_AS(p.check(), Error);
  p = {};
  p.sigma2 = -1.0;
  CHECK_THROWS_AS(p.check(), Error);
  CHECK(parse_context_mode("literal") == ContextMode::literal);
  CHECK(parse_position_mode("squared") == PositionMode::squared);
  CHECK(to_string(PositionMode::literal) == "literal");
  CHECK_THROWS_AS(parse_position_mode("cubic"), Error);
}
