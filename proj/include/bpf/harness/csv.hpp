#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpf/models/model.hpp"

namespace bpf {

/// 17 significant digits; nan, inf and -inf spelled out.
std::string format_double(double v);

/// Parses a full cell as a double. Empty, "NA" and "nan" give NaN.
/// Throws std::invalid_argument on anything else.
double parse_double(std::string_view cell);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws if absent
};

/// Comma-separated, no quoting. Blank lines are skipped. Errors name the
/// 1-based line number.
CsvTable read_csv_table(std::istream& is);
CsvTable read_csv_table_file(const std::string& path);

/// A "time,<column>..." series. `columns` (when non-empty) must equal the
/// header's value columns. Times must be strictly increasing.
Series load_csv(std::istream& is, std::span<const std::string> columns = {});
Series load_csv_file(const std::string& path, std::span<const std::string> columns = {});

void write_series_csv(std::ostream& os, const Series& s, std::span<const std::string> columns);

}  // namespace bpf
