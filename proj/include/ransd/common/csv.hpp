#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ransd::csv {

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one CSV record; handles quoted fields with doubled quotes.
std::vector<std::string> split_row(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV file with a header row. Blank lines are skipped.
Table read_file(const std::string& path);

/// Shortest text that round-trips to the same double.
std::string format_number(double value);

double parse_number(std::string_view text);

}  // namespace ransd::csv
