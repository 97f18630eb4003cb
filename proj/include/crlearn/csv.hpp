#pragma once

#include <string>
#include <vector>

#include "crlearn/types.hpp"

namespace crlearn {

/// Decimal formatting used by every CSV writer: 17 significant digits, which
/// round-trips IEEE doubles exactly.
std::string format_double(double value);

/// CSV with an optional single header line, one observation per row.
/// Throws ParseError (with line number) on malformed rows and NonFiniteValue
/// (with line and column) on nan/inf entries.
DataMatrix load_observations(const std::string& path);

/// Writes a matrix as CSV; `header` may be empty for a headerless file.
void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& header);

}  // namespace crlearn
