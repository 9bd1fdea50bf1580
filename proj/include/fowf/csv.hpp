#pragma once

#include <string>
#include <vector>

namespace fowf {

/// Numeric CSV with a header row. Columns are addressed by name.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws IoError naming the column when absent.
  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// Blank lines and lines starting with '#' are skipped. `module` tags errors.
CsvTable read_csv(const std::string& path, const std::string& module);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns, const std::string& module);

}  // namespace fowf
