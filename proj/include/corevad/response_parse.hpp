#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corevad/types.hpp"

namespace corevad {

enum class Decision { normal = 0, anomalous = 1, indeterminate = 2 };

struct DecisionParse {
  Decision decision = Decision::indeterminate;
  std::string description;
};

/// How indeterminate responses are resolved to a binary decision.
enum class Fallback { treat_normal, inherit_previous };

Fallback parse_fallback(std::string_view token);
std::string_view to_string(Fallback fallback);

inline constexpr std::string_view kAnomalousMarker = "anomalous scenes";
inline constexpr std::string_view kNormalMarker = "normal scenes";

/// Finds the verdict phrase ("Anomalous scenes" / "Normal scenes",
/// case-insensitive, not preceded by a letter so "abnormal scenes" does not
/// count as normal). The earliest phrase wins when both occur. The
/// description is the text with that phrase removed, together with the
/// whitespace and at most one separator mark (":", "-", ",", ";", ".") on
/// each side of it.
DecisionParse parse_decision(std::string_view raw_text);

struct ParsedResponses {
  std::vector<int> decisions;  // resolved, each 0 or 1
  std::vector<std::string> descriptions;
  std::vector<Decision> raw_decisions;  // before fallback
  std::size_t indeterminate_count = 0;
};

/// Parses every response of one video (sorted by segment_index) and resolves
/// indeterminate verdicts with `fallback`.
ParsedResponses parse_all(std::span<const SegmentResponse> responses,
                          Fallback fallback = Fallback::treat_normal);

}  // namespace corevad
