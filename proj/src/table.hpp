#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dhtsim {

enum class Format { csv, json };
enum class ColumnKind { integer, real };

// Rectangular experiment output plus the resolved config it came from.
// Real cells are written with 6 significant digits in both formats, so a
// parse of an emitted file reproduces the emitted bytes.
struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;  // ordered key/value
  std::vector<std::string> columns;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> cells) { rows.emplace_back(cells); }
};

// Refuses empty tables. CSV: "# key=value" metadata lines, a header line,
// then one line per record. JSON: {"metadata": {...}, "records": [{...}]}.
void emit(const Table& t, Format format, std::ostream& os);
void emit_file(const Table& t, Format format, const std::string& path);  // "" or "-" = stdout

Table parse(Format format, std::istream& is);
Table parse_file(Format format, const std::string& path);

std::string format_cell(double v, ColumnKind kind);

}  // namespace dhtsim
