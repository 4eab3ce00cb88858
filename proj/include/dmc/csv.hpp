#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dmc/errors.hpp"

namespace dmc {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { rows_.push_back(std::move(header)); }

  void add_row(std::string row) { rows_.push_back(std::move(row)); }

  std::string to_string() const {
    std::string out;
    for (const auto& r : rows_) {
      out += r;
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
    }
    out << to_string();
    if (!out) {
      throw Error(ErrorCode::io_error, "write failed: " + path);
    }
  }

 private:
  std::vector<std::string> rows_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::io_error, "write failed: " + path);
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open for reading: " + path);
  }
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

}  // namespace dmc
