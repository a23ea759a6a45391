#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "braid/core.hpp"
#include "braid/datagen.hpp"

namespace braid {

// Braid text format: a header line
//   # braid v1 m=<m> U=<U> shift=<s> gen=<hex>[ vals=real]
// optionally followed by further '#' comment lines (adversarial labels live
// there), then one record per line, "<stream_id> <value>", in arrival order.
struct BraidFileHeader {
  std::uint32_t m = 0;
  std::uint64_t u = 0;
  std::uint64_t shift = 0;
  std::uint64_t spec_hash = 0;
  bool real_valued = false;
  bool has_label = false;
  bool label_yes = false;
  StreamId intersection_stream = 0;
};

// Forward-only record reader; offers no way to rewind or seek, so a consumer
// is single-pass by construction. Ids and integer values are validated
// against the header as they stream by.
class BraidReader {
 public:
  explicit BraidReader(const std::string& path);

  const BraidFileHeader& header() const { return header_; }
  // False at end of file; FormatError on malformed or out-of-range records.
  bool next(StreamId& id, double& value);
  std::uint64_t records_read() const { return records_; }

 private:
  std::ifstream in_;
  BraidFileHeader header_;
  std::uint64_t records_ = 0;
  std::uint64_t line_ = 0;
};

void write_braid(const std::string& path, const GeneratedBraid& braid);

struct LoadedBraid {
  BraidFileHeader header;
  std::vector<BraidItem> items;                         // integer braids
  std::vector<std::pair<StreamId, double>> real_items;  // vals=real braids
};

LoadedBraid read_braid(const std::string& path);

}  // namespace braid
