#include "ransd/common/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ransd/common/error.hpp"

namespace ransd::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_row(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw Error(ErrorKind::Format, path + " has no header row");
  return table;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorKind::Format, "number formatting failed");
  return std::string(buf, end);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw Error(ErrorKind::Format, "not a finite number: '" + std::string(text) + "'");
  return value;
}

}  // namespace ransd::csv
