#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tvi/errors.hpp"

namespace tvi {

/// Round-trip decimal form: 17 significant digits reproduce the double bit
/// pattern on read-back, which keeps emitted CSVs byte-stable.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Line-oriented CSV emitter.  Cells are written verbatim, so callers are
/// responsible for keeping commas out of text cells.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void numeric_row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(cells[i]);
    }
    out_ << '\n';
  }

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }

  void close() {
    out_.close();
    if (out_.fail()) throw IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

/// A parsed numeric CSV: one string header, numeric data rows, and any
/// '#'-prefixed comment lines kept verbatim (footers like "# slope=...").
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  /// Index of a header column, -1 when absent.
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  CsvTable t;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    if (!saw_header) {
      t.header = detail::split_csv_line(line);
      saw_header = true;
      continue;
    }
    auto cells = detail::split_csv_line(line);
    if (cells.size() != t.header.size())
      throw IoError(path + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(t.header.size()));
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (const auto& c : cells) {
      const char* s = c.c_str();
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end == s || *end != '\0') throw IoError(path + ": non-numeric cell '" + c + "'");
      vals.push_back(v);
    }
    t.rows.push_back(std::move(vals));
  }
  if (!saw_header) throw IoError(path + ": no header line");
  return t;
}

}  // namespace tvi
