#pragma once

// Minimal CSV tables. Numbers are written in the shortest form that parses
// back to the same double; headers carry units as "name[unit]".

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace shuttle {

std::string format_number(double v);

class CsvTable {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  // Throws std::invalid_argument if the row width does not match the header.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

// Header plus raw text cells; no quoting support beyond what CsvTable emits.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by exact header text; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvData read_csv(const std::filesystem::path& path);
CsvData parse_csv(const std::string& text);

}  // namespace shuttle
