#include "corevad/response_parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "corevad/error.hpp"

namespace corevad {

namespace {

bool is_punct_separator(char c) { return c == ':' || c == '-' || c == ',' || c == ';' || c == '.'; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Whitespace, at most one separator mark, whitespace. Taking a single mark
// keeps punctuation that belongs to the description itself.
std::string_view strip_after_marker(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  if (!s.empty() && is_punct_separator(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return s;
}

std::string_view strip_before_marker(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (!s.empty() && is_punct_separator(s.back())) s.remove_suffix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// First case-insensitive occurrence of `marker` not preceded by a letter.
std::optional<std::size_t> find_marker(std::string_view text, std::string_view marker) {
  if (marker.size() > text.size()) return std::nullopt;
  for (std::size_t pos = 0; pos + marker.size() <= text.size(); ++pos) {
    bool match = true;
    for (std::size_t k = 0; k < marker.size(); ++k) {
      if (lower(text[pos + k]) != marker[k]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    if (pos > 0 && std::isalpha(static_cast<unsigned char>(text[pos - 1]))) continue;
    return pos;
  }
  return std::nullopt;
}

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Fallback parse_fallback(std::string_view token) {
  if (token == "treat_normal") return Fallback::treat_normal;
  if (token == "inherit_previous") return Fallback::inherit_previous;
  fail(ErrorKind::invalid_argument, "unknown parse.fallback \"" + std::string(token) + "\"");
}

std::string_view to_string(Fallback fallback) {
  return fallback == Fallback::treat_normal ? "treat_normal" : "inherit_previous";
}

DecisionParse parse_decision(std::string_view raw_text) {
  const auto anomalous = find_marker(raw_text, kAnomalousMarker);
  const auto normal = find_marker(raw_text, kNormalMarker);
  if (!anomalous && !normal) return {Decision::indeterminate, std::string(raw_text)};

  const bool pick_anomalous = anomalous && (!normal || *anomalous < *normal);
  const std::size_t pos = pick_anomalous ? *anomalous : *normal;
  const std::size_t len = pick_anomalous ? kAnomalousMarker.size() : kNormalMarker.size();

  const std::string_view before = trim_ws(strip_before_marker(raw_text.substr(0, pos)));
  const std::string_view after = trim_ws(strip_after_marker(raw_text.substr(pos + len)));

  std::string description(before);
  if (!before.empty() && !after.empty()) description += ' ';
  description += after;
  return {pick_anomalous ? Decision::anomalous : Decision::normal, std::move(description)};
}

ParsedResponses parse_all(std::span<const SegmentResponse> responses, Fallback fallback) {
  if (responses.empty()) fail(ErrorKind::invalid_argument, "parse_all: empty response list");
  ParsedResponses out;
  out.decisions.reserve(responses.size());
  out.descriptions.reserve(responses.size());
  out.raw_decisions.reserve(responses.size());
  int last_resolved = 0;
  for (const auto& r : responses) {
    auto parsed = parse_decision(r.raw_text);
    int value = 0;
    switch (parsed.decision) {
      case Decision::anomalous: value = 1; break;
      case Decision::normal: value = 0; break;
      case Decision::indeterminate:
        ++out.indeterminate_count;
        value = fallback == Fallback::inherit_previous ? last_resolved : 0;
        break;
    }
    last_resolved = value;
    out.decisions.push_back(value);
    out.raw_decisions.push_back(parsed.decision);
    out.descriptions.push_back(std::move(parsed.description));
  }
  return out;
}

}  // namespace corevad
