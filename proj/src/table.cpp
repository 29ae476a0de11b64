#include "table.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace dhtsim {

std::string format_cell(double v, ColumnKind kind) {
  char buf[64];
  if (kind == ColumnKind::integer)
    std::snprintf(buf, sizeof buf, "%" PRId64, static_cast<int64_t>(v));
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

static void check_shape(const Table& t) {
  if (t.rows.empty()) fail(Status::invalid_argument, "refusing to emit an empty record list");
  if (t.columns.empty() || t.columns.size() != t.kinds.size())
    fail(Status::invalid_argument, "table columns and kinds disagree");
  for (const auto& r : t.rows)
    if (r.size() != t.columns.size()) fail(Status::invalid_argument, "ragged table row");
}

static void emit_csv(const Table& t, std::ostream& os) {
  for (const auto& [k, v] : t.metadata) os << "# " << k << '=' << v << '\n';
  for (size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_cell(row[c], t.kinds[c]);
    os << '\n';
  }
}

static void emit_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json j;
  auto& meta = j["metadata"];
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  auto& records = j["records"];
  records = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json rec;
    for (size_t c = 0; c < row.size(); ++c) {
      if (t.kinds[c] == ColumnKind::integer)
        rec[t.columns[c]] = static_cast<int64_t>(row[c]);
      else
        rec[t.columns[c]] = std::stod(format_cell(row[c], ColumnKind::real));
    }
    records.push_back(std::move(rec));
  }
  os << j.dump(2) << '\n';
}

void emit(const Table& t, Format format, std::ostream& os) {
  check_shape(t);
  if (format == Format::csv)
    emit_csv(t, os);
  else
    emit_json(t, os);
  if (!os) fail(Status::io_error, "write failed");
}

void emit_file(const Table& t, Format format, const std::string& path) {
  check_shape(t);
  if (path.empty() || path == "-") {
    emit(t, format, std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Status::io_error, "cannot open " + path + " for writing");
  emit(t, format, os);
  if (!os) fail(Status::io_error, "write to " + path + " failed");
}

static ColumnKind infer_kind(const std::string& cell) {
  return cell.find_first_of(".eE") == std::string::npos ? ColumnKind::integer : ColumnKind::real;
}

static Table parse_csv(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(Status::io_error, "malformed metadata line: " + line);
      t.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) cells.push_back(tok);
    if (!have_header) {
      t.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) fail(Status::io_error, "ragged csv row: " + line);
    if (t.kinds.empty())
      for (const auto& c : cells) t.kinds.push_back(infer_kind(c));
    std::vector<double> row;
    row.reserve(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      if (infer_kind(cells[c]) == ColumnKind::real) t.kinds[c] = ColumnKind::real;
      row.push_back(std::stod(cells[c]));
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header || t.rows.empty()) fail(Status::io_error, "csv has no records");
  return t;
}

static Table parse_json(std::istream& is) {
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Status::io_error, std::string("json parse failed: ") + e.what());
  }
  Table t;
  if (j.contains("metadata"))
    for (auto& [k, v] : j["metadata"].items()) t.metadata.emplace_back(k, v.get<std::string>());
  if (!j.contains("records") || j["records"].empty()) fail(Status::io_error, "json has no records");
  for (auto& [k, v] : j["records"][0].items()) {
    t.columns.push_back(k);
    t.kinds.push_back(v.is_number_integer() ? ColumnKind::integer : ColumnKind::real);
  }
  for (auto& rec : j["records"]) {
    std::vector<double> row;
    for (size_t c = 0; c < t.columns.size(); ++c) {
      const auto& v = rec[t.columns[c]];
      if (!v.is_number_integer()) t.kinds[c] = ColumnKind::real;
      row.push_back(v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table parse(Format format, std::istream& is) {
  return format == Format::csv ? parse_csv(is) : parse_json(is);
}

Table parse_file(Format format, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Status::io_error, "cannot open " + path);
  return parse(format, is);
}

}  // namespace dhtsim
