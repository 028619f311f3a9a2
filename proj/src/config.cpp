#include "corevad/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "corevad/error.hpp"

namespace corevad {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v)) {
    fail(ErrorKind::invalid_argument, "config: " + key + " expects a number, got \"" + value + "\"");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    fail(ErrorKind::invalid_argument, "config: " + key + " expects an integer, got \"" + value + "\"");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  fail(ErrorKind::invalid_argument, "config: " + key + " expects true/false, got \"" + value + "\"");
}

const char* format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

void PipelineConfig::check() const {
  if (interval < 1) fail(ErrorKind::invalid_argument, "config: d must be >= 1");
  if (frames_per_segment < 1) fail(ErrorKind::invalid_argument, "config: n must be >= 1");
  refine.check();
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    // Only whole-line comments: XD-Violence names contain '#'.
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::invalid_argument, "config line " + std::to_string(line_no) + ": expected \"key = value\"");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) fail(ErrorKind::invalid_argument, "config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

PipelineConfig apply_key_values(PipelineConfig c, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "d") {
      c.interval = static_cast<int>(to_integer(key, value));
    } else if (key == "n") {
      c.frames_per_segment = static_cast<int>(to_integer(key, value));
    } else if (key == "parse.fallback") {
      c.fallback = parse_fallback(value);
    } else if (key == "clean.strategy") {
      c.strategy = parse_cleaning_strategy(value);
    } else if (key == "clean.l") {
      const auto l = to_integer(key, value);
      if (l < 0) fail(ErrorKind::invalid_argument, "config: clean.l must be >= 0");
      c.window = static_cast<std::size_t>(l);
    } else if (key == "refine.tau") {
      c.refine.tau = to_double(key, value);
    } else if (key == "refine.kernel_radius") {
      c.refine.kernel_radius = static_cast<int>(to_integer(key, value));
    } else if (key == "refine.sigma1") {
      c.refine.sigma1 = to_double(key, value);
    } else if (key == "refine.sigma2_mode") {
      c.refine.sigma2_mode = parse_position_mode(value);
    } else if (key == "refine.sigma2") {
      if (value == "auto") {
        c.refine.sigma2.reset();
      } else {
        c.refine.sigma2 = to_double(key, value);
      }
    } else if (key == "refine.eq3_mode") {
      c.refine.context_mode = parse_context_mode(value);
    } else if (key == "refine.toggles.context_refine") {
      c.refine.toggles.context_refine = to_bool(key, value);
    } else if (key == "refine.toggles.smoothing") {
      c.refine.toggles.smoothing = to_bool(key, value);
    } else if (key == "refine.toggles.position_weight") {
      c.refine.toggles.position_weight = to_bool(key, value);
    } else if (key == "paths.responses") {
      c.responses = value;
    } else if (key == "paths.embeddings") {
      c.embeddings = value;
    } else if (key == "paths.gt") {
      c.ground_truth = value;
    } else if (key == "paths.gt_format") {
      c.ground_truth_format = parse_ground_truth_format(value);
    } else if (key == "paths.frames") {
      c.frame_counts = value;
    } else if (key == "paths.out") {
      c.out = value;
    } else if (key == "run.threads") {
      const auto t = to_integer(key, value);
      if (t < 0) fail(ErrorKind::invalid_argument, "config: run.threads must be >= 0");
      c.threads = static_cast<unsigned>(t);
    } else if (key == "run.seed") {
      const auto s = to_integer(key, value);
      if (s < 0) fail(ErrorKind::invalid_argument, "config: run.seed must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "output.plots") {
      c.plots = to_bool(key, value);
    } else {
      fail(ErrorKind::invalid_argument, "config: unknown key \"" + key + "\"");
    }
  }
  c.check();
  return c;
}

KeyValues to_key_values(const PipelineConfig& c) {
  KeyValues kv;
  kv["d"] = std::to_string(c.interval);
  kv["n"] = std::to_string(c.frames_per_segment);
  kv["parse.fallback"] = std::string(to_string(c.fallback));
  kv["clean.strategy"] = std::string(to_string(c.strategy));
  kv["clean.l"] = std::to_string(c.window);
  kv["refine.tau"] = format_double(c.refine.tau);
  kv["refine.kernel_radius"] = std::to_string(c.refine.kernel_radius);
  kv["refine.sigma1"] = format_double(c.refine.sigma1);
  kv["refine.sigma2_mode"] = std::string(to_string(c.refine.sigma2_mode));
  kv["refine.sigma2"] = c.refine.sigma2 ? format_double(*c.refine.sigma2) : "auto";
  kv["refine.eq3_mode"] = std::string(to_string(c.refine.context_mode));
  kv["refine.toggles.context_refine"] = format_bool(c.refine.toggles.context_refine);
  kv["refine.toggles.smoothing"] = format_bool(c.refine.toggles.smoothing);
  kv["refine.toggles.position_weight"] = format_bool(c.refine.toggles.position_weight);
  kv["paths.responses"] = c.responses.string();
  kv["paths.embeddings"] = c.embeddings.string();
  kv["paths.gt"] = c.ground_truth.string();
  kv["paths.gt_format"] = std::string(to_string(c.ground_truth_format));
  kv["paths.frames"] = c.frame_counts.string();
  kv["paths.out"] = c.out.string();
  kv["run.threads"] = std::to_string(c.threads);
  kv["run.seed"] = std::to_string(c.seed);
  kv["output.plots"] = format_bool(c.plots);
  return kv;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  try {
    return apply_key_values(PipelineConfig{}, parse_key_values(read_text_file(path)));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace corevad
