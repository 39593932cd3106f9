#include "tailent/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tailent/common.hpp"

namespace tailent {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double* out) {
  const std::string trimmed = strip(cell);
  if (trimmed.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (errno != 0 || end != trimmed.c_str() + trimmed.size()) return false;
  *out = v;
  return true;
}

}  // namespace

CsvTable read_csv(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);

  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    rows.push_back(split_line(line, delimiter));
  }
  if (rows.empty()) throw ValidationError(path + ": empty file");
  if (rows.size() < 2) throw ValidationError(path + ": no data rows");

  const std::size_t width = rows[0].size();
  if (width == 0) throw ValidationError(path + ": header row is empty");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      std::ostringstream msg;
      msg << path << ": row " << i + 1 << " has " << rows[i].size()
          << " cells, expected " << width;
      throw ValidationError(msg.str());
    }
  }

  // A first column that fails numeric parsing anywhere is a date index.
  bool drop_first = false;
  double probe = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!parse_double(rows[i][0], &probe)) {
      drop_first = true;
      break;
    }
  }
  const std::size_t start_col = drop_first ? 1 : 0;
  if (start_col >= width) {
    throw ValidationError(path + ": no numeric columns");
  }

  CsvTable table;
  table.dropped_index_column = drop_first;
  if (drop_first) table.index_name = strip(rows[0][0]);
  for (std::size_t j = start_col; j < width; ++j) {
    table.column_names.push_back(strip(rows[0][j]));
  }
  const std::size_t n = rows.size() - 1;
  table.values.resize(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(width - start_col));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = start_col; j < width; ++j) {
      double v = 0.0;
      if (!parse_double(rows[i + 1][j], &v)) {
        std::ostringstream msg;
        msg << path << ": cannot parse '" << strip(rows[i + 1][j])
            << "' at row " << i + 2 << ", column " << j + 1;
        throw ValidationError(msg.str());
      }
      table.values(static_cast<Eigen::Index>(i),
                   static_cast<Eigen::Index>(j - start_col)) = v;
    }
  }
  return table;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns,
               char delimiter) {
  if (header.size() != columns.size()) {
    throw ValidationError("write_csv: header/column count mismatch");
  }
  if (columns.empty()) throw ValidationError("write_csv: no columns");
  const std::size_t n = columns[0].size();
  for (const auto& col : columns) {
    if (col.size() != n) {
      throw ValidationError("write_csv: columns have different lengths");
    }
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << delimiter;
    out << header[j];
  }
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j > 0) out << delimiter;
      out << format_double(columns[j][i]);
    }
    out << "\n";
  }
  if (!out) throw ValidationError("failed writing " + path);
}

std::string format_double(double v) {
  // Try the shortest fixed precision that round-trips, capped at 17
  // significant digits.
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace tailent
