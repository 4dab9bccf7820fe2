#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace temai {

/// Weight expressed in per-ten-thousand (‱), stored exactly as an integer
/// count of hundredths so that table sums never drift.
class Permyriad {
 public:
  constexpr Permyriad() = default;

  static constexpr Permyriad from_hundredths(std::int64_t hundredths) {
    Permyriad p;
    p.hundredths_ = hundredths;
    return p;
  }
  /// Rounds half away from zero to the nearest 0.01‱.
  static Permyriad from_value(double permyriad);
  /// Accepts "1888.89", "10000", "0.5"; at most two fractional digits.
  static Permyriad parse(std::string_view text);

  constexpr std::int64_t hundredths() const { return hundredths_; }
  constexpr double value() const { return static_cast<double>(hundredths_) / 100.0; }
  constexpr double fraction() const { return static_cast<double>(hundredths_) / 1'000'000.0; }

  /// Always two fractional digits.
  std::string to_string() const;

  constexpr Permyriad operator+(Permyriad other) const { return from_hundredths(hundredths_ + other.hundredths_); }
  constexpr Permyriad& operator+=(Permyriad other) {
    hundredths_ += other.hundredths_;
    return *this;
  }
  constexpr auto operator<=>(const Permyriad&) const = default;

 private:
  std::int64_t hundredths_ = 0;
};

inline constexpr Permyriad kFullDimension = Permyriad::from_hundredths(1'000'000);

}  // namespace temai
