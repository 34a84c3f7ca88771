#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace goxlens {

/// Exact non-negative decimal with a fixed number of fractional digits.
/// Dedup keys compare these bit-for-bit; conversion to floating point only
/// happens when a value enters an analysis.
template <int Digits>
class Fixed {
  static_assert(Digits >= 0 && Digits <= 12);

 public:
  static constexpr std::int64_t kScale = [] {
    std::int64_t s = 1;
    for (int i = 0; i < Digits; ++i) s *= 10;
    return s;
  }();

  constexpr Fixed() = default;

  static constexpr Fixed from_raw(std::int64_t raw) {
    Fixed f;
    f.raw_ = raw;
    return f;
  }

  /// Parses "123", "123.4", ".5". Extra fractional digits are rounded half
  /// away from zero. Negative values and anything non-numeric are rejected.
  static std::optional<Fixed> parse(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;

    std::int64_t whole = 0;
    std::size_t i = 0;
    bool any_digit = false;
    for (; i < text.size() && text[i] != '.'; ++i) {
      const char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      if (whole > INT64_MAX / kScale / 10) return std::nullopt;
      whole = whole * 10 + (c - '0');
      any_digit = true;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool round_up = false;
    if (i < text.size()) {
      ++i;  // '.'
      for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') return std::nullopt;
        any_digit = true;
        if (frac_digits < Digits) {
          frac = frac * 10 + (c - '0');
          ++frac_digits;
        } else if (frac_digits == Digits) {
          round_up = c >= '5';
          ++frac_digits;
        }
      }
    }
    if (!any_digit) return std::nullopt;
    for (int d = std::min(frac_digits, Digits); d < Digits; ++d) frac *= 10;
    std::int64_t raw = whole * kScale + frac + (round_up ? 1 : 0);
    return from_raw(raw);
  }

  constexpr std::int64_t raw() const { return raw_; }
  constexpr double to_double() const { return static_cast<double>(raw_) / static_cast<double>(kScale); }
  constexpr bool is_zero() const { return raw_ == 0; }

  std::string to_string() const {
    std::string out = std::to_string(raw_ / kScale);
    if constexpr (Digits > 0) {
      std::string frac = std::to_string(raw_ % kScale);
      out += '.';
      out.append(static_cast<std::size_t>(Digits) - frac.size(), '0');
      out += frac;
    }
    return out;
  }

  constexpr Fixed& operator+=(Fixed o) {
    raw_ += o.raw_;
    return *this;
  }
  friend constexpr Fixed operator+(Fixed a, Fixed b) { return a += b; }
  friend constexpr auto operator<=>(Fixed, Fixed) = default;

 private:
  std::int64_t raw_ = 0;
};

using Btc = Fixed<8>;
using Money = Fixed<5>;

}  // namespace goxlens
