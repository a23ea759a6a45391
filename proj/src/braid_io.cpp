#include "braid/braid_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace braid {

namespace {

std::uint64_t parse_u64_field(const std::string& token, const char* key, int base = 10) {
  std::string prefix = std::string(key) + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw FormatError(std::string("expected header field ") + key);
  }
  const char* s = token.c_str() + prefix.size();
  char* end = nullptr;
  std::uint64_t v = std::strtoull(s, &end, base);
  if (end == s || *end != '\0') {
    throw FormatError(std::string("bad header field ") + token);
  }
  return v;
}

BraidFileHeader parse_header_line(const std::string& line) {
  std::istringstream is(line);
  std::string hash_mark, name, version;
  is >> hash_mark >> name >> version;
  if (hash_mark != "#" || name != "braid" || version != "v1") {
    throw FormatError("not a braid v1 file");
  }
  BraidFileHeader h;
  std::string token;
  if (!(is >> token)) throw FormatError("missing m field");
  h.m = static_cast<std::uint32_t>(parse_u64_field(token, "m"));
  if (!(is >> token)) throw FormatError("missing U field");
  h.u = parse_u64_field(token, "U");
  if (!(is >> token)) throw FormatError("missing shift field");
  h.shift = parse_u64_field(token, "shift");
  if (!(is >> token)) throw FormatError("missing gen field");
  h.spec_hash = parse_u64_field(token, "gen", 16);
  while (is >> token) {
    if (token == "vals=real") {
      h.real_valued = true;
    } else {
      throw FormatError("unknown header token: " + token);
    }
  }
  if (h.m < 1) throw FormatError("braid header needs m >= 1");
  if (h.u < 2 || !is_power_of_two(h.u)) {
    throw FormatError("braid header needs U a power of two >= 2");
  }
  return h;
}

void parse_label_comment(const std::string& line, BraidFileHeader& h) {
  std::istringstream is(line);
  std::string hash_mark, token;
  is >> hash_mark;
  while (is >> token) {
    if (token == "label=yes") {
      h.has_label = true;
      h.label_yes = true;
    } else if (token == "label=no") {
      h.has_label = true;
      h.label_yes = false;
    } else if (token.rfind("isect=", 0) == 0) {
      h.intersection_stream = static_cast<StreamId>(std::strtoull(token.c_str() + 6, nullptr, 10));
    }
  }
}

}  // namespace

BraidReader::BraidReader(const std::string& path) : in_(path) {
  if (!in_) throw FormatError("cannot open braid file: " + path);
  std::string line;
  if (!std::getline(in_, line)) throw FormatError("empty braid file: " + path);
  ++line_;
  header_ = parse_header_line(line);
  // Further comment lines (labels, provenance) directly after the header.
  while (in_.peek() == '#') {
    if (!std::getline(in_, line)) break;
    ++line_;
    parse_label_comment(line, header_);
  }
}

bool BraidReader::next(StreamId& id, double& value) {
  std::string line;
  for (;;) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty()) break;
  }
  const char* s = line.c_str();
  char* end = nullptr;
  std::uint64_t raw_id = std::strtoull(s, &end, 10);
  if (end == s) throw FormatError("bad record at line " + std::to_string(line_));
  char* end2 = nullptr;
  double v = std::strtod(end, &end2);
  if (end2 == end || (*end2 != '\0' && *end2 != '\r')) {
    throw FormatError("bad record at line " + std::to_string(line_));
  }
  if (raw_id < 1 || raw_id > header_.m) {
    throw FormatError("stream id out of [1, m] at line " + std::to_string(line_));
  }
  if (!header_.real_valued) {
    if (v < 1.0 || v > static_cast<double>(header_.u) || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
      throw FormatError("value out of [1, U] at line " + std::to_string(line_));
    }
  }
  id = static_cast<StreamId>(raw_id);
  value = v;
  ++records_;
  return true;
}

void write_braid(const std::string& path, const GeneratedBraid& braid) {
  std::string tmp = path + ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw FormatError("cannot write braid file: " + tmp);
    std::fprintf(f, "# braid v1 m=%" PRIu32 " U=%" PRIu64 " shift=%" PRIu64 " gen=%016" PRIx64 "%s\n",
                 braid.m, braid.u, braid.shift, braid.spec_hash,
                 braid.real_valued ? " vals=real" : "");
    if (braid.has_label) {
      if (braid.label_yes) {
        std::fprintf(f, "# label=yes\n");
      } else {
        std::fprintf(f, "# label=no isect=%" PRIu32 "\n", braid.intersection_stream);
      }
    }
    if (braid.real_valued) {
      for (const auto& [id, v] : braid.real_items) {
        std::fprintf(f, "%" PRIu32 " %.17g\n", id, v);
      }
    } else {
      for (const auto& item : braid.items) {
        std::fprintf(f, "%" PRIu32 " %" PRIu64 "\n", item.stream_id, item.value);
      }
    }
    if (std::fclose(f) != 0) throw FormatError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("cannot move " + tmp + " into place: " + ec.message());
}

LoadedBraid read_braid(const std::string& path) {
  BraidReader reader(path);
  LoadedBraid out;
  out.header = reader.header();
  StreamId id = 0;
  double value = 0.0;
  std::uint64_t arrival = 0;
  while (reader.next(id, value)) {
    if (out.header.real_valued) {
      out.real_items.push_back({id, value});
    } else {
      out.items.push_back({id, static_cast<std::uint64_t>(value), arrival});
    }
    ++arrival;
  }
  return out;
}

}  // namespace braid
