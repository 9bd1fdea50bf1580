#include "fowf/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fowf/error.hpp"

namespace fowf {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("csv", "missing column '" + name + "'");
  return columns[static_cast<std::size_t>(it - header.begin())];
}

bool CsvTable::has(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::string& path, const std::string& module) {
  std::ifstream in(path);
  if (!in) throw IoError(module, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      t.columns.assign(t.header.size(), {});
      continue;
    }
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << "'" << path << "' line " << lineno << ": expected " << t.header.size() << " fields, got "
         << cells.size();
      throw IoError(module, os.str());
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const char* b = cells[c].data();
      const char* e = b + cells[c].size();
      const auto r = std::from_chars(b, e, v);
      if (r.ec != std::errc() || r.ptr != e) {
        std::ostringstream os;
        os << "'" << path << "' line " << lineno << ": cannot parse '" << cells[c] << "'";
        throw IoError(module, os.str());
      }
      t.columns[c].push_back(v);
    }
  }
  if (t.header.empty()) throw IoError(module, "empty file '" + path + "'");
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns, const std::string& module) {
  if (header.size() != columns.size()) throw IoError(module, "header and column count differ");
  std::ofstream out(path);
  if (!out) throw IoError(module, "cannot write '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n' << std::setprecision(12);
  const std::size_t n = columns.empty() ? 0 : columns.front()->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << (*columns[c])[i];
    out << '\n';
  }
}

}  // namespace fowf
