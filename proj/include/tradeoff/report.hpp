#pragma once

// byte-stable report plumbing: shortest round-trip number formatting, a fixed
// column CSV writer, and the config fingerprint carried by every output row.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "tradeoff/numerics.hpp"

namespace tradeoff {

// shortest decimal string that parses back to the same double
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_int(long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_u64(std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) {
    require(cells.size() == columns_.size(), "CsvWriter: wrong cell count");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i)
      out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "CsvWriter: cannot open output file");
    const std::string body = str();
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    require(f.good(), "CsvWriter: write failed");
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// long-format table shared by every command: one metric per row
class LongCsv {
 public:
  LongCsv() : writer_({"schema_version", "config_hash", "eps", "metric", "value", "se"}) {}

  void add(const std::string& hash, double eps, const std::string& metric, double value,
           double se) {
    writer_.add_row({"1", hash, fmt_double(eps), metric, fmt_double(value), fmt_double(se)});
  }

  void write(const std::string& path) const { writer_.write(path); }

 private:
  CsvWriter writer_;
};

}  // namespace tradeoff
