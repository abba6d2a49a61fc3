#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace renorm {

// %.17g round-trips doubles exactly and is locale-independent here, so a
// fixed config and seed reproduce output files byte for byte.
inline std::string num17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> r) { rows.push_back(std::move(r)); }

  std::string str() const {
    std::string out = join(header);
    for (const auto& r : rows) {
      out += '\n';
      out += join(r);
    }
    out += '\n';
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        line += cells[i];
      } else {
        line += '"';
        for (char c : cells[i]) {
          if (c == '"') line += '"';
          line += c;
        }
        line += '"';
      }
    }
    return line;
  }
};

}  // namespace renorm
