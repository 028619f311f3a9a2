#include "corevad/ingest.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "corevad/error.hpp"

namespace corevad {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

int require_int(const json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorKind::validation, std::string(where) + ": missing key \"" + key + "\"");
  }
  if (!it->is_number_integer()) {
    fail(ErrorKind::validation, std::string(where) + ": \"" + key + "\" must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(ErrorKind::validation, std::string(where) + ": \"" + key + "\" out of range");
  }
  return static_cast<int>(v);
}

std::string require_string(const json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorKind::validation, std::string(where) + ": missing key \"" + key + "\"");
  }
  if (!it->is_string()) {
    fail(ErrorKind::validation, std::string(where) + ": \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

// --- little-endian helpers -------------------------------------------------

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      fail(ErrorKind::validation, std::string("embeddings: truncated payload while reading ") + what);
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

const char* section_name(std::size_t tag) {
  switch (tag) {
    case 0: return "vision";
    case 1: return "response_text";
    case 2: return "description_text";
  }
  return "unknown";
}

void check_matrix(const Matrix& m, std::size_t rows, std::size_t dim, const char* name) {
  if (m.rows != rows) {
    fail(ErrorKind::validation, std::string("embeddings: row-count mismatch: ") + name + " has " +
                                    std::to_string(m.rows) + " rows, expected " + std::to_string(rows));
  }
  if (m.cols != dim) {
    fail(ErrorKind::validation, std::string("embeddings: column mismatch: ") + name + " has " +
                                    std::to_string(m.cols) + " columns, expected " + std::to_string(dim));
  }
  if (m.data.size() != rows * dim) {
    fail(ErrorKind::validation, std::string("embeddings: ") + name + " storage size inconsistent with shape");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (float x : m.row(r)) {
      if (!std::isfinite(x)) {
        fail(ErrorKind::validation, std::string("embeddings: non-finite entry in ") + name + " row " +
                                        std::to_string(r + 1));
      }
      sq += static_cast<double>(x) * static_cast<double>(x);
    }
    if (!(sq > 0.0)) {
      fail(ErrorKind::validation, std::string("embeddings: zero-norm row in ") + name + " row " +
                                      std::to_string(r + 1));
    }
  }
}

std::string strip_video_extension(std::string name) {
  static constexpr std::array<std::string_view, 6> kExt = {".mp4", ".avi", ".mkv", ".webm", ".mov", ".mpg"};
  for (auto ext : kExt) {
    if (name.size() > ext.size()) {
      std::string tail = name.substr(name.size() - ext.size());
      std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
      if (tail == ext) return name.substr(0, name.size() - ext.size());
    }
  }
  return name;
}

int parse_int_token(const std::string& tok, std::string_view where) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail(ErrorKind::validation, std::string(where) + ": expected integer, got \"" + tok + "\"");
  }
}

int frames_for(const FrameCounts& counts, const std::string& id, std::string_view where) {
  const auto it = counts.find(id);
  if (it == counts.end()) {
    fail(ErrorKind::validation, std::string(where) + ": num_frames unknown for video \"" + id + "\"");
  }
  return it->second;
}

LabelSeries normalize_labels(LabelSeries labels) {
  std::sort(labels.anomalous_ranges.begin(), labels.anomalous_ranges.end(),
            [](const FrameRange& a, const FrameRange& b) { return a.start < b.start || (a.start == b.start && a.end < b.end); });
  check_labels(labels);
  return labels;
}

LabelSeries label_from_json(const json& obj, std::string_view where) {
  if (!obj.is_object()) fail(ErrorKind::validation, std::string(where) + ": expected a JSON object");
  LabelSeries ls;
  ls.video_id = require_string(obj, "video_id", where);
  ls.num_frames = require_int(obj, "num_frames", where);
  const auto it = obj.find("anomalous_ranges");
  if (it == obj.end() || !it->is_array()) {
    fail(ErrorKind::validation, std::string(where) + ": \"anomalous_ranges\" must be an array");
  }
  for (const auto& r : *it) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      fail(ErrorKind::validation, std::string(where) + ": each range must be [start, end]");
    }
    ls.anomalous_ranges.push_back({r[0].get<int>(), r[1].get<int>()});
  }
  return normalize_labels(std::move(ls));
}

}  // namespace

// --- responses ---------------------------------------------------------------

ResponseTable parse_responses(std::string_view text, std::optional<int> interval, std::string_view source) {
  static const std::set<std::string> kKeys = {"video_id", "segment_index", "start_frame", "end_frame", "raw_text"};
  ResponseTable table;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string where = std::string(source) + ":" + std::to_string(n + 1);
    if (trim(lines[n]).empty()) continue;
    json obj;
    try {
      obj = json::parse(lines[n]);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::validation, where + ": malformed JSON line (" + e.what() + ")");
    }
    if (!obj.is_object()) fail(ErrorKind::validation, where + ": malformed line, expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
      if (!kKeys.contains(key)) fail(ErrorKind::validation, where + ": unexpected key \"" + key + "\"");
    }
    SegmentResponse rec;
    rec.video_id = require_string(obj, "video_id", where);
    rec.segment_index = require_int(obj, "segment_index", where);
    rec.start_frame = require_int(obj, "start_frame", where);
    rec.end_frame = require_int(obj, "end_frame", where);
    rec.raw_text = require_string(obj, "raw_text", where);
    if (rec.video_id.empty()) fail(ErrorKind::validation, where + ": empty video_id");
    if (rec.raw_text.empty()) fail(ErrorKind::validation, where + ": empty raw_text");
    if (rec.segment_index < 1) fail(ErrorKind::validation, where + ": segment_index must be >= 1");
    if (rec.start_frame < 1 || rec.start_frame > rec.end_frame) {
      fail(ErrorKind::validation, where + ": invalid span " + std::to_string(rec.start_frame) + "-" +
                                      std::to_string(rec.end_frame));
    }
    auto& group = table[rec.video_id];
    for (const auto& other : group) {
      if (other.segment_index == rec.segment_index) {
        fail(ErrorKind::validation, where + ": duplicate record for (" + rec.video_id + ", " +
                                        std::to_string(rec.segment_index) + ")");
      }
    }
    group.push_back(std::move(rec));
  }

  for (auto& [video, group] : table) {
    std::sort(group.begin(), group.end(),
              [](const SegmentResponse& a, const SegmentResponse& b) { return a.segment_index < b.segment_index; });
    for (std::size_t k = 0; k < group.size(); ++k) {
      const auto& seg = group[k];
      const std::string where = std::string(source) + ": video \"" + video + "\" segment " +
                                std::to_string(seg.segment_index);
      if (seg.segment_index != static_cast<int>(k) + 1) {
        fail(ErrorKind::validation, where + ": segment indices must run 1..M without gaps");
      }
      const int expected_start = k == 0 ? 1 : group[k - 1].end_frame + 1;
      if (seg.start_frame != expected_start) {
        fail(ErrorKind::validation, where + ": non-contiguous spans (starts at frame " +
                                        std::to_string(seg.start_frame) + ", expected " +
                                        std::to_string(expected_start) + ")");
      }
      if (interval) {
        const bool last = k + 1 == group.size();
        const int len = seg.span().length();
        if (len > *interval || (!last && len != *interval)) {
          fail(ErrorKind::validation, where + ": span length " + std::to_string(len) +
                                          " inconsistent with segment interval " + std::to_string(*interval));
        }
      }
    }
  }
  return table;
}

ResponseTable load_responses(const std::filesystem::path& path, std::optional<int> interval) {
  return parse_responses(read_text_file(path), interval, path.string());
}

std::string format_responses(std::span<const SegmentResponse> records) {
  std::string out;
  for (const auto& r : records) {
    // nlohmann::json sorts object keys, so the line is assembled by hand.
    out += "{\"video_id\":" + json(r.video_id).dump() + ",\"segment_index\":" + std::to_string(r.segment_index) +
           ",\"start_frame\":" + std::to_string(r.start_frame) + ",\"end_frame\":" + std::to_string(r.end_frame) +
           ",\"raw_text\":" + json(r.raw_text).dump() + "}\n";
  }
  return out;
}

void write_responses(const std::filesystem::path& path, std::span<const SegmentResponse> records) {
  write_text_file(path, format_responses(records));
}

// --- embeddings --------------------------------------------------------------

void check_bundle(const EmbeddingBundle& bundle) {
  if (bundle.dim == 0) fail(ErrorKind::validation, "embeddings: dim must be > 0");
  const std::size_t rows = bundle.vision.rows;
  if (rows == 0) fail(ErrorKind::validation, "embeddings: at least one row required");
  check_matrix(bundle.vision, rows, bundle.dim, "vision");
  check_matrix(bundle.response_text, rows, bundle.dim, "response_text");
  check_matrix(bundle.description_text, rows, bundle.dim, "description_text");
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingBundle& bundle) {
  check_bundle(bundle);
  if (bundle.video_id.size() > 0xffff) fail(ErrorKind::validation, "embeddings: video_id too long");
  if (bundle.dim > 0xffffffffu || bundle.rows() > 0xffffffffu) {
    fail(ErrorKind::validation, "embeddings: shape exceeds u32");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + bundle.video_id.size() + 3 * (1 + bundle.vision.data.size() * 4));
  out.insert(out.end(), std::begin(kEmbeddingMagic), std::end(kEmbeddingMagic));
  put_u32(out, kEmbeddingVersion);
  put_u16(out, static_cast<std::uint16_t>(bundle.video_id.size()));
  out.insert(out.end(), bundle.video_id.begin(), bundle.video_id.end());
  put_u32(out, static_cast<std::uint32_t>(bundle.dim));
  put_u32(out, static_cast<std::uint32_t>(bundle.rows()));
  const std::array<const Matrix*, 3> sections = {&bundle.vision, &bundle.response_text, &bundle.description_text};
  for (std::size_t tag = 0; tag < sections.size(); ++tag) {
    put_u8(out, static_cast<std::uint8_t>(tag));
    for (float x : sections[tag]->data) put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

EmbeddingBundle decode_embeddings(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kEmbeddingMagic))) {
    fail(ErrorKind::validation, "embeddings: bad magic (expected \"CRVB\")");
  }
  const auto version = in.u32("version");
  if (version != kEmbeddingVersion) {
    fail(ErrorKind::validation, "embeddings: version mismatch (file " + std::to_string(version) + ", supported " +
                                    std::to_string(kEmbeddingVersion) + ")");
  }
  EmbeddingBundle bundle;
  const auto id_len = in.u16("video_id length");
  const auto id = in.take(id_len, "video_id");
  bundle.video_id.assign(id.begin(), id.end());
  bundle.dim = in.u32("dim");
  const std::size_t rows = in.u32("rows");
  if (bundle.dim == 0) fail(ErrorKind::validation, "embeddings: dim must be > 0");

  const std::size_t row_bytes = bundle.dim * 4;
  const std::size_t section_bytes = rows * row_bytes;
  std::array<Matrix*, 3> targets = {&bundle.vision, &bundle.response_text, &bundle.description_text};
  for (std::size_t s = 0; s < targets.size(); ++s) {
    if (in.remaining() == 0) {
      fail(ErrorKind::validation, "embeddings: section count " + std::to_string(s) + " != 3");
    }
    const auto tag = in.u8("section tag");
    if (tag > 2) fail(ErrorKind::validation, "embeddings: unknown section tag " + std::to_string(tag));
    if (tag != s) {
      fail(ErrorKind::validation, std::string("embeddings: section ") + section_name(tag) +
                                      " out of order (expected " + section_name(s) + ")");
    }
    if (in.remaining() < section_bytes) {
      const std::size_t left = in.remaining();
      // A whole number of rows left in the final section means the writer
      // produced fewer rows than the header declares.
      if (s + 1 == targets.size() && left % row_bytes == 0) {
        fail(ErrorKind::validation, std::string("embeddings: row-count mismatch: ") + section_name(s) + " has " +
                                        std::to_string(left / row_bytes) + " rows, expected " +
                                        std::to_string(rows));
      }
      fail(ErrorKind::validation, std::string("embeddings: truncated payload in section ") + section_name(s));
    }
    Matrix& m = *targets[s];
    m = Matrix(rows, bundle.dim);
    const auto payload = in.take(section_bytes, "section payload");
    for (std::size_t k = 0; k < m.data.size(); ++k) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(payload[4 * k + b]) << (8 * b);
      m.data[k] = std::bit_cast<float>(bits);
    }
  }
  if (in.remaining() != 0) {
    if (in.remaining() > 1 && (in.remaining() - 1) % row_bytes == 0) {
      fail(ErrorKind::validation, "embeddings: section count != 3 (extra section after description_text)");
    }
    fail(ErrorKind::validation, "embeddings: " + std::to_string(in.remaining()) + " trailing bytes");
  }
  check_bundle(bundle);
  return bundle;
}

EmbeddingBundle load_embeddings(const std::filesystem::path& path) {
  const auto bytes = read_binary_file(path);
  try {
    return decode_embeddings(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingBundle& bundle) {
  const auto bytes = encode_embeddings(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

// --- ground truth ------------------------------------------------------------

GroundTruthFormat parse_ground_truth_format(std::string_view token) {
  if (token == "normalized") return GroundTruthFormat::normalized;
  if (token == "ucf_crime_txt") return GroundTruthFormat::ucf_crime_txt;
  if (token == "xd_violence_txt") return GroundTruthFormat::xd_violence_txt;
  fail(ErrorKind::invalid_argument, "unknown ground-truth format \"" + std::string(token) + "\"");
}

std::string_view to_string(GroundTruthFormat format) {
  switch (format) {
    case GroundTruthFormat::normalized: return "normalized";
    case GroundTruthFormat::ucf_crime_txt: return "ucf_crime_txt";
    case GroundTruthFormat::xd_violence_txt: return "xd_violence_txt";
  }
  return "normalized";
}

void check_labels(const LabelSeries& labels) {
  const std::string where = "labels for \"" + labels.video_id + "\"";
  if (labels.num_frames < 1) fail(ErrorKind::validation, where + ": num_frames must be >= 1");
  int prev_end = 0;
  for (const auto& r : labels.anomalous_ranges) {
    const std::string range = "(" + std::to_string(r.start) + "," + std::to_string(r.end) + ")";
    if (r.start > r.end) fail(ErrorKind::validation, where + ": inverted range " + range);
    if (r.start < 1 || r.end > labels.num_frames) {
      fail(ErrorKind::validation, where + ": range " + range + " outside [1, " + std::to_string(labels.num_frames) + "]");
    }
    if (r.start <= prev_end) fail(ErrorKind::validation, where + ": overlapping range " + range);
    prev_end = r.end;
  }
}

FrameCounts load_frame_counts(const std::filesystem::path& path) {
  FrameCounts counts;
  const auto lines = split_lines(read_text_file(path));
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    std::string id, frames, extra;
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    if (!(ss >> id >> frames) || (ss >> extra)) fail(ErrorKind::validation, where + ": expected \"video_id num_frames\"");
    counts[strip_video_extension(id)] = parse_int_token(frames, where);
  }
  return counts;
}

std::vector<LabelSeries> parse_ground_truth(std::string_view text, GroundTruthFormat format,
                                            const FrameCounts& frame_counts) {
  std::vector<LabelSeries> out;
  if (format == GroundTruthFormat::normalized) {
    // Accept a JSON array, a single object, or one object per line.
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded()) {
      if (whole.is_array()) {
        for (std::size_t k = 0; k < whole.size(); ++k) {
          out.push_back(label_from_json(whole[k], "ground truth entry " + std::to_string(k + 1)));
        }
      } else {
        out.push_back(label_from_json(whole, "ground truth"));
      }
    } else {
      const auto lines = split_lines(text);
      for (std::size_t n = 0; n < lines.size(); ++n) {
        if (trim(lines[n]).empty()) continue;
        const std::string where = "ground truth line " + std::to_string(n + 1);
        json obj = json::parse(lines[n], nullptr, false);
        if (obj.is_discarded()) fail(ErrorKind::validation, where + ": malformed JSON");
        out.push_back(label_from_json(obj, where));
      }
    }
  } else {
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
      const auto line = trim(lines[n]);
      if (line.empty() || line.front() == '#') continue;
      const std::string where = "ground truth line " + std::to_string(n + 1);
      std::istringstream ss(line);
      std::vector<std::string> tokens{std::istream_iterator<std::string>(ss), std::istream_iterator<std::string>()};
      LabelSeries ls;
      ls.video_id = strip_video_extension(tokens.front());
      std::vector<int> bounds;
      if (format == GroundTruthFormat::ucf_crime_txt) {
        if (tokens.size() != 6) {
          fail(ErrorKind::validation, where + ": expected \"name class s1 e1 s2 e2\"");
        }
        for (std::size_t k = 2; k < 6; ++k) bounds.push_back(parse_int_token(tokens[k], where));
      } else {
        if (tokens.size() % 2 != 1) {
          fail(ErrorKind::validation, where + ": expected \"name s1 e1 [s2 e2 ...]\"");
        }
        for (std::size_t k = 1; k < tokens.size(); ++k) bounds.push_back(parse_int_token(tokens[k], where));
      }
      for (std::size_t k = 0; k + 1 < bounds.size(); k += 2) {
        const int s = bounds[k];
        const int e = bounds[k + 1];
        if (s == -1 && e == -1 && format == GroundTruthFormat::ucf_crime_txt) continue;
        if (s == -1 || e == -1) fail(ErrorKind::validation, where + ": half-open sentinel pair");
        ls.anomalous_ranges.push_back({s, e});
      }
      ls.num_frames = frames_for(frame_counts, ls.video_id, where);
      for (const auto& prev : out) {
        if (prev.video_id == ls.video_id) fail(ErrorKind::validation, where + ": duplicate video \"" + ls.video_id + "\"");
      }
      out.push_back(normalize_labels(std::move(ls)));
    }
  }
  return out;
}

std::vector<LabelSeries> load_ground_truth(const std::filesystem::path& path, GroundTruthFormat format,
                                           const FrameCounts& frame_counts) {
  try {
    return parse_ground_truth(read_text_file(path), format, frame_counts);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// --- validation --------------------------------------------------------------

void ValidationReport::add(Severity severity, std::string code, std::string message) {
  if (severity == Severity::error) is_fatal = true;
  issues.push_back({severity, std::move(code), std::move(message)});
}

ValidationReport validate_bundle(std::span<const SegmentResponse> responses, const EmbeddingBundle& embeddings,
                                 const LabelSeries* labels) {
  ValidationReport report;
  report.video_id = !responses.empty() ? responses.front().video_id : embeddings.video_id;

  if (responses.empty()) report.add(Severity::error, "no-responses", "no segment responses");
  for (const auto& r : responses) {
    if (r.video_id != report.video_id) {
      report.add(Severity::error, "video-id-mismatch", "responses mix videos \"" + report.video_id + "\" and \"" + r.video_id + "\"");
      break;
    }
  }
  if (embeddings.video_id != report.video_id) {
    report.add(Severity::error, "video-id-mismatch",
               "embeddings belong to \"" + embeddings.video_id + "\", responses to \"" + report.video_id + "\"");
  }
  if (labels && labels->video_id != report.video_id) {
    report.add(Severity::error, "video-id-mismatch",
               "labels belong to \"" + labels->video_id + "\", responses to \"" + report.video_id + "\"");
  }

  if (embeddings.dim == 0) report.add(Severity::error, "zero-dim", "embedding dimension is 0");
  try {
    check_bundle(embeddings);
  } catch (const Error& e) {
    report.add(Severity::error, "bad-embeddings", e.what());
  }
  if (responses.size() != embeddings.rows()) {
    report.add(Severity::error, "row-count-mismatch",
               "row-count mismatch: " + std::to_string(responses.size()) + " responses, " +
                   std::to_string(embeddings.rows()) + " embedding rows");
  }

  int expected_start = 1;
  for (std::size_t k = 0; k < responses.size(); ++k) {
    const auto& r = responses[k];
    if (r.segment_index != static_cast<int>(k) + 1 || r.start_frame != expected_start || r.end_frame < r.start_frame) {
      report.add(Severity::error, "non-contiguous-spans",
                 "segment " + std::to_string(r.segment_index) + " breaks the contiguous 1..M span layout");
      break;
    }
    expected_start = r.end_frame + 1;
  }

  if (labels && !responses.empty()) {
    const int covered = responses.back().end_frame;
    if (covered > labels->num_frames) {
      report.add(Severity::error, "coverage-exceeds-labels",
                 "responses cover " + std::to_string(covered) + " frames but labels have " +
                     std::to_string(labels->num_frames));
    } else if (covered < labels->num_frames) {
      report.add(Severity::warning, "trailing-uncovered",
                 std::to_string(labels->num_frames - covered) + " trailing frames uncovered");
    }
  }
  return report;
}

// --- files -------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

}  // namespace corevad
