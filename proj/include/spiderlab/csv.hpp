#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "spiderlab/common.hpp"

namespace spiderlab {

// Locale-independent numeric formatting ('.' decimal, round-trip precision).
inline std::string csv_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Minimal CSV emitter: mandatory header row, LF line endings, no quoting
// (all emitted fields are addresses or numbers without commas).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ParameterError("cannot open output file: " + path);
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace spiderlab
