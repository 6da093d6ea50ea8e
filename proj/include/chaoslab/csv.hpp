#ifndef CHAOSLAB_CSV_HPP
#define CHAOSLAB_CSV_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace chaoslab {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Minimal CSV table: header row, then rows of preformatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& cell(const std::string& s) { cells_.push_back(s); return *this; }
    Row& cell(const char* s) { return cell(std::string(s)); }
    Row& cell(double v) { return cell(format_double(v)); }
    Row& cell(std::int64_t v) { return cell(std::to_string(v)); }
    Row& cell(int v) { return cell(std::to_string(v)); }
    Row& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
    std::vector<std::string> cells_;
  };

  Row& new_row() { rows_.emplace_back(); return rows_.back(); }

  std::string to_string() const {
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r.cells_);
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    f << to_string();
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    return line;
  }

  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

}  // namespace chaoslab

#endif
