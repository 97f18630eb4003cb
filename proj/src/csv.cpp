#include "crlearn/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace crlearn {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

// Strict, locale-independent parse; accepts nan/inf (rejected later by the
// finiteness check) so a data row of "nan" is NonFiniteValue, not a header.
bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

DataMatrix load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::vector<std::string> fields = split_fields(stripped);

    std::vector<double> row(fields.size());
    bool all_numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], row[c])) {
        all_numeric = false;
        bad_col = c;
        break;
      }
    }

    if (!all_numeric) {
      if (first_content_line) {
        first_content_line = false;  // header line
        continue;
      }
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ", column " +
                      std::to_string(bad_col + 1) + ": cannot parse '" +
                      fields[bad_col] + "'");
    }

    for (std::size_t c = 0; c < row.size(); ++c)
      if (!std::isfinite(row[c]))
        throw Error(ErrorCode::NonFiniteValue,
                    "line " + std::to_string(lineno) + ", column " +
                        std::to_string(c + 1) + ": non-finite value");

    if (width == 0) width = row.size();
    if (row.size() != width)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(row.size()));
    rows.push_back(std::move(row));
    first_content_line = false;
  }

  if (rows.empty())
    throw Error(ErrorCode::ParseError, "'" + path + "' contains no data rows");

  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return DataMatrix(std::move(values));
}

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  if (!header.empty()) {
    if (static_cast<Index>(header.size()) != values.cols())
      throw Error(ErrorCode::InvalidConfig, "header width mismatch");
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << "\n";
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << "\n";
  }
  if (!out)
    throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace crlearn
