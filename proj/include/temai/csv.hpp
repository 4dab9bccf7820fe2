#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace temai::csv {

using Row = std::vector<std::string>;

/// RFC 4180-style reader: quoted fields, doubled quotes, CRLF or LF. Blank
/// lines are skipped and unquoted fields are trimmed.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

/// Decimal or simple fraction ("1/3").
double parse_number(std::string_view text);

}  // namespace temai::csv
