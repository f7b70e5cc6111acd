#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mfou::csv {

/// Shortest-round-trip-safe rendering: 17 significant digits, `nan`/`inf`
/// spelled out.
std::string number(double v);

/// Six significant digits, for messages.
std::string brief(double v);

/// Writes one row, comma separated, terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

/// Parses a comma separated line (no quoting; cells never contain commas).
std::vector<std::string> split_row(std::string_view line);

}  // namespace mfou::csv
