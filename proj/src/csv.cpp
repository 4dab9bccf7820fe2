#include "temai/csv.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "temai/error.hpp"

namespace temai::csv {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_decimal(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse, fmt::format("'{}' is not a number", whole));
  }
  return value;
}

}  // namespace

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  bool line_has_content = false;

  const auto end_field = [&] {
    row.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };
  const auto end_row = [&] {
    end_field();
    if (line_has_content) rows.push_back(std::move(row));
    row.clear();
    line_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (trim(field).empty()) field.clear();
        quoted = true;
        was_quoted = true;
        line_has_content = true;
        break;
      case ',':
        line_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        if (!std::isspace(static_cast<unsigned char>(c))) line_has_content = true;
        field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::parse, "unterminated quoted CSV field");
  end_row();
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(row[i]);
  }
  out.push_back('\n');
  return out;
}

double parse_number(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw Error(ErrorCode::parse, "empty numeric CSV field");
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const double num = parse_decimal(std::string_view(t).substr(0, slash), t);
    const double den = parse_decimal(std::string_view(t).substr(slash + 1), t);
    if (den == 0.0) throw Error(ErrorCode::parse, fmt::format("'{}' divides by zero", t));
    return num / den;
  }
  return parse_decimal(t, t);
}

}  // namespace temai::csv
