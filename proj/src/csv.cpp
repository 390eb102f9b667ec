#include "rfio/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rfio/core.hpp"

namespace rfio {

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw Error("table " + name + ": row width does not match the header");
  rows.push_back(std::move(row));
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(unsigned long long v) { return std::to_string(v); }

std::string hex(unsigned long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", v);
  return buf;
}

namespace {

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cell(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string csv_render(const Table& t, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  line(out, t.header);
  for (const auto& r : t.rows) line(out, r);
  return out;
}

void csv_write(const std::string& path, const Table& t, const std::vector<std::string>& comments) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << csv_render(t, comments);
}

}  // namespace rfio
