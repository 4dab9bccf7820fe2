#include "temai/decimal.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "temai/error.hpp"

namespace temai {

Permyriad Permyriad::from_value(double permyriad) {
  if (!std::isfinite(permyriad)) {
    throw Error(ErrorCode::validation, "weight must be finite");
  }
  return from_hundredths(static_cast<std::int64_t>(std::llround(permyriad * 100.0)));
}

Permyriad Permyriad::parse(std::string_view text) {
  const auto fail = [&] {
    return Error(ErrorCode::parse, fmt::format("malformed decimal weight '{}'", text));
  };
  if (text.empty()) throw fail();

  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::int64_t whole = 0;
  std::size_t int_digits = 0;
  for (; pos < text.size() && text[pos] != '.'; ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') throw fail();
    whole = whole * 10 + (c - '0');
    if (++int_digits > 15) throw fail();
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (pos < text.size()) {
    ++pos;  // '.'
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c < '0' || c > '9') throw fail();
      if (++frac_digits > 2) throw fail();
      frac = frac * 10 + (c - '0');
    }
    if (frac_digits == 0) throw fail();
  }
  if (int_digits == 0) throw fail();
  if (frac_digits == 1) frac *= 10;

  const std::int64_t h = whole * 100 + frac;
  return from_hundredths(negative ? -h : h);
}

std::string Permyriad::to_string() const {
  const std::int64_t mag = hundredths_ < 0 ? -hundredths_ : hundredths_;
  return fmt::format("{}{}.{:02d}", hundredths_ < 0 ? "-" : "", mag / 100, mag % 100);
}

}  // namespace temai
