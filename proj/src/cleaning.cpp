#include "corevad/cleaning.hpp"

#include <algorithm>
#include <cmath>

#include "corevad/error.hpp"

namespace corevad {

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::invalid_argument, "cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                                          " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = static_cast<double>(a[k]);
    const double y = static_cast<double>(b[k]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorKind::invalid_argument, "cosine_similarity: zero-norm input");
  // sqrt(na) * sqrt(nb) is commutative, so cos(a,b) == cos(b,a) bit for bit.
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double sq = 0.0;
    for (float x : m.row(r)) sq += static_cast<double>(x) * static_cast<double>(x);
    if (!(sq > 0.0)) fail(ErrorKind::invalid_argument, "cosine_matrix: zero-norm row " + std::to_string(r + 1));
    norms[r] = std::sqrt(sq);
  }
  return norms;
}

void check_inputs(const ParsedResponses& parsed, const EmbeddingBundle& embeddings) {
  const std::size_t m = parsed.decisions.size();
  if (m == 0) fail(ErrorKind::invalid_argument, "cleaning: no segments");
  if (parsed.descriptions.size() != m || embeddings.vision.rows != m || embeddings.response_text.rows != m) {
    fail(ErrorKind::validation, "cleaning: segment count mismatch between responses (" + std::to_string(m) +
                                    ") and embeddings (" + std::to_string(embeddings.vision.rows) + ")");
  }
}

CleaningResult select_in_window(const ParsedResponses& parsed, const EmbeddingBundle& embeddings, std::size_t window) {
  check_inputs(parsed, embeddings);
  const std::size_t m = parsed.decisions.size();
  const auto sims = cosine_matrix(embeddings.vision, embeddings.response_text);

  CleaningResult result;
  result.selected_index.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t lo = j > window ? j - window : 0;
    const std::size_t hi = std::min(m - 1, window >= m ? m - 1 : j + window);
    const double* row = sims.data() + j * m;
    std::size_t best = j;
    // Scan outward from j so the first strict maximum is also the nearest,
    // and the left candidate is seen before the right one at equal distance.
    for (std::size_t dist = 1; dist <= std::max(j - lo, hi - j); ++dist) {
      if (dist <= j - lo && row[j - dist] > row[best]) best = j - dist;
      if (j + dist <= hi && row[j + dist] > row[best]) best = j + dist;
    }
    result.selected_index[j] = best;
  }
  for (std::size_t j = 0; j < m; ++j) {
    result.decisions.push_back(parsed.decisions[result.selected_index[j]]);
    result.descriptions.push_back(parsed.descriptions[result.selected_index[j]]);
  }
  return result;
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

double cosine_similarity(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

std::vector<double> cosine_matrix(const Matrix& queries, const Matrix& keys) {
  if (queries.cols != keys.cols) fail(ErrorKind::invalid_argument, "cosine_matrix: dimension mismatch");
  const auto qn = row_norms(queries);
  const auto kn = row_norms(keys);
  std::vector<double> out(queries.rows * keys.rows);
  for (std::size_t i = 0; i < queries.rows; ++i) {
    const auto q = queries.row(i);
    for (std::size_t k = 0; k < keys.rows; ++k) {
      const auto v = keys.row(k);
      double dot = 0.0;
      for (std::size_t c = 0; c < q.size(); ++c) dot += static_cast<double>(q[c]) * static_cast<double>(v[c]);
      out[i * keys.rows + k] = dot / (qn[i] * kn[k]);
    }
  }
  return out;
}

CleaningStrategy parse_cleaning_strategy(std::string_view token) {
  if (token == "none") return CleaningStrategy::none;
  if (token == "global") return CleaningStrategy::global;
  if (token == "lrc") return CleaningStrategy::lrc;
  fail(ErrorKind::invalid_argument, "unknown clean.strategy \"" + std::string(token) + "\"");
}

std::string_view to_string(CleaningStrategy strategy) {
  switch (strategy) {
    case CleaningStrategy::none: return "none";
    case CleaningStrategy::global: return "global";
    case CleaningStrategy::lrc: return "lrc";
  }
  return "none";
}

CleaningResult clean_lrc(const ParsedResponses& parsed, const EmbeddingBundle& embeddings, std::size_t window) {
  return select_in_window(parsed, embeddings, window);
}

CleaningResult clean_global(const ParsedResponses& parsed, const EmbeddingBundle& embeddings) {
  check_inputs(parsed, embeddings);
  return select_in_window(parsed, embeddings, parsed.decisions.size());
}

CleaningResult clean_none(const ParsedResponses& parsed) {
  CleaningResult result;
  for (std::size_t j = 0; j < parsed.decisions.size(); ++j) result.selected_index.push_back(j);
  result.decisions = parsed.decisions;
  result.descriptions = parsed.descriptions;
  return result;
}

CleaningResult clean(const ParsedResponses& parsed, const EmbeddingBundle& embeddings, CleaningStrategy strategy,
                     std::size_t window) {
  switch (strategy) {
    case CleaningStrategy::none: return clean_none(parsed);
    case CleaningStrategy::global: return clean_global(parsed, embeddings);
    case CleaningStrategy::lrc: return clean_lrc(parsed, embeddings, window);
  }
  return clean_none(parsed);
}

}  // namespace corevad
