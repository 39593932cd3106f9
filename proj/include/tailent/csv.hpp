#pragma once

// Small CSV layer for the CLI and tests: header row required, '.' decimal
// separator, configurable delimiter.  A leading non-numeric column (a date
// index) is detected automatically and excluded from the numeric matrix.
// Values are written with enough digits to round-trip exactly.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tailent {

struct CsvTable {
  std::vector<std::string> column_names;  // numeric columns only
  Eigen::MatrixXd values;
  bool dropped_index_column = false;
  std::string index_name;  // header of the dropped column, if any
};

CsvTable read_csv(const std::string& path, char delimiter = ',');

// Writes one row per entry of the column vectors (all must share a length).
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns,
               char delimiter = ',');

// Shortest representation that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tailent
