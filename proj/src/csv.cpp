#include "shuttle/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shuttle {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i]))
        out += format_number(*d);
      else if (const auto* n = std::get_if<std::int64_t>(&row[i]))
        out += std::to_string(*n);
      else
        out += std::get<std::string>(row[i]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << str();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

std::vector<double> CsvData::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const std::string& s = r.at(c);
    double v = 0;
    if (s == "nan") v = NAN;
    else if (s == "inf") v = INFINITY;
    else if (s == "-inf") v = -INFINITY;
    else {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("column '" + name + "': '" + s + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}
}  // namespace

CsvData parse_csv(const std::string& text) {
  CsvData d;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty csv");
  d.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    d.rows.push_back(split(line));
    if (d.rows.back().size() != d.header.size())
      throw std::invalid_argument("csv row width does not match header");
  }
  return d;
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace shuttle
