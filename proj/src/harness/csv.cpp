#include "bpf/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bpf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view cell) {
  const auto t = trim(cell);
  if (t.empty() || t == "NA" || t == "nan" || t == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (t == "inf" || t == "+inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("cannot parse '" + std::string(t) + "' as a number");
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::invalid_argument("csv: missing column '" + std::string(name) + "'");
}

CsvTable read_csv_table(std::istream& is) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::invalid_argument("csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw std::invalid_argument("csv: missing header");
  return t;
}

CsvTable read_csv_table_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv_table(f);
}

Series load_csv(std::istream& is, std::span<const std::string> columns) {
  // Line numbers are needed for errors, so parse directly rather than via read_csv_table.
  Series out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      if (cells.empty() || cells[0] != "time") throw std::invalid_argument("csv: first column must be 'time'");
      width = cells.size() - 1;
      if (!columns.empty()) {
        if (columns.size() != width) throw std::invalid_argument("csv: header does not match the expected columns");
        for (std::size_t c = 0; c < width; ++c)
          if (cells[c + 1] != columns[c])
            throw std::invalid_argument("csv: expected column '" + columns[c] + "', found '" + cells[c + 1] + "'");
      }
      have_header = true;
      continue;
    }
    const std::string where = "csv: line " + std::to_string(lineno) + ": ";
    if (cells.size() != width + 1) throw std::invalid_argument(where + "wrong number of cells");
    Observation o;
    try {
      o.time = parse_double(cells[0]);
      o.values.reserve(width);
      for (std::size_t c = 1; c <= width; ++c) o.values.push_back(parse_double(cells[c]));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
    if (!std::isfinite(o.time)) throw std::invalid_argument(where + "time must be finite");
    if (!out.empty() && !(o.time > out.back().time))
      throw std::invalid_argument(where + "time is not strictly increasing");
    out.push_back(std::move(o));
  }
  if (!have_header) throw std::invalid_argument("csv: missing header");
  return out;
}

Series load_csv_file(const std::string& path, std::span<const std::string> columns) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return load_csv(f, columns);
}

void write_series_csv(std::ostream& os, const Series& s, std::span<const std::string> columns) {
  os << "time";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const auto& o : s) {
    if (o.values.size() != columns.size()) throw std::invalid_argument("write_series_csv: width mismatch");
    os << format_double(o.time);
    for (double v : o.values) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace bpf
