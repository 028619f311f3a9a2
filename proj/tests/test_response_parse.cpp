#include <doctest.h>

#include "corevad/error.hpp"
#include "corevad/response_parse.hpp"

using namespace corevad;

namespace {

SegmentResponse resp(int j, std::string text) { return {"v", j, 30 * (j - 1) + 1, 30 * j, std::move(text)}; }

}  // namespace

TEST_CASE("decision markers") {
  auto a = parse_decision("Anomalous scenes: a man hits another man.");
  CHECK(a.decision == Decision::anomalous);
  CHECK(a.description == "a man hits another man.");

  auto n = parse_decision("Normal scenes - people walk in a mall");
  CHECK(n.decision == Decision::normal);
  CHECK(n.description == "people walk in a mall");

  CHECK(parse_decision("ANOMALOUS SCENES: fire").decision == Decision::anomalous);
  CHECK(parse_decision("The video shows normal scenes of traffic.").decision == Decision::normal);
  CHECK(parse_decision("I cannot tell.").decision == Decision::indeterminate);
  CHECK(parse_decision("").decision == Decision::indeterminate);
}

TEST_CASE("\"abnormal scenes\" is not a normal verdict") {
  CHECK(parse_decision("abnormal scenes: a robbery").decision == Decision::indeterminate);
  CHECK(parse_decision("Abnormal scenes then Anomalous scenes: theft").decision == Decision::anomalous);
}

TEST_CASE("earliest marker wins when both occur") {
  auto d = parse_decision("Normal scenes: nothing like anomalous scenes here");
  CHECK(d.decision == Decision::normal);
  CHECK(d.description == "nothing like anomalous scenes here");
  CHECK(parse_decision("Anomalous scenes, not normal scenes").decision == Decision::anomalous);
}

TEST_CASE("description keeps text around the marker") {
  auto d = parse_decision("Verdict: Anomalous scenes. A car burns.");
  CHECK(d.decision == Decision::anomalous);
  CHECK(d.description == "Verdict A car burns.");
}

TEST_CASE("fallback policies") {
  const std::vector<SegmentResponse> rs{resp(1, "Anomalous scenes: x"), resp(2, "unclear"), resp(3, "Normal scenes: y"),
                                        resp(4, "???")};
  const auto normal = parse_all(rs, Fallback::treat_normal);
  CHECK(normal.decisions == std::vector<int>{1, 0, 0, 0});
  CHECK(normal.indeterminate_count == 2);
  CHECK(normal.raw_decisions[1] == Decision::indeterminate);

  const auto inherit = parse_all(rs, Fallback::inherit_previous);
  CHECK(inherit.decisions == std::vector<int>{1, 1, 0, 0});

  // A leading indeterminate has nothing to inherit and becomes normal.
  const std::vector<SegmentResponse> lead{resp(1, "hmm"), resp(2, "Anomalous scenes: z")};
  CHECK(parse_all(lead, Fallback::inherit_previous).decisions == std::vector<int>{0, 1});
}

TEST_CASE("fallback names") {
  CHECK(parse_fallback("treat_normal") == Fallback::treat_normal);
  CHECK(parse_fallback("inherit_previous") == Fallback::inherit_previous);
  CHECK(to_string(Fallback::inherit_previous) == "inherit_previous");
  CHECK_THROWS_AS(parse_fallback("guess"), Error);
}

TEST_CASE("parse_all rejects an empty video") { CHECK_THROWS_AS(parse_all({}), Error); }

TEST_CASE("marker prefix leaves the rest of the text as the description") {
  for (const std::string s : {"a man runs.", "  - a dash first", ": colon first", "x", "", "people, cars; bikes.",
                              "\tleading tab "}) {
    const auto d = parse_decision("Anomalous scenes: " + s);
    CHECK(d.decision == Decision::anomalous);
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    CHECK(d.description == (first == std::string::npos ? "" : s.substr(first, last - first + 1)));
  }
}
