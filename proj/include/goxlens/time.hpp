#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace goxlens {

/// Seconds since 1970-01-01 00:00:00 UTC.
using Timestamp = std::int64_t;
/// Days since 1970-01-01.
using Day = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;
inline constexpr Timestamp kBarSeconds = 1800;
inline constexpr int kBarsPerDay = 48;

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};

Day days_from_civil(CivilDate d);
CivilDate civil_from_days(Day z);

constexpr Day day_of(Timestamp t) { return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay); }
constexpr Timestamp floor_to_bar(Timestamp t) {
  const Timestamp r = t % kBarSeconds;
  return r >= 0 ? t - r : t - r - kBarSeconds;
}

/// 0 = Monday ... 6 = Sunday.
constexpr int weekday_of(Day d) {
  // 1970-01-01 was a Thursday.
  const Day w = (d + 3) % 7;
  return static_cast<int>(w >= 0 ? w : w + 7);
}
constexpr Day iso_week_start(Day d) { return d - weekday_of(d); }

/// "YYYY-MM-DD HH:MM:SS"; also accepts a 'T' separator, "HH:MM" without
/// seconds, and a trailing 'Z'.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// "YYYY-MM-DD".
std::optional<Day> parse_date(std::string_view text);
/// Either form; a bare date maps to 00:00:00 of that day.
std::optional<Timestamp> parse_date_or_timestamp(std::string_view text);

std::string format_timestamp(Timestamp t);
std::string format_date(Day d);

/// Closed interval [start, end] of UTC seconds.
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  constexpr bool contains(Timestamp t) const { return t >= start && t <= end; }
  constexpr bool empty() const { return end < start; }
  friend constexpr bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// 2011-06-26 00:00:00 .. 2013-05-20 23:59:59.
TimeWindow default_wash_window();

/// "START..END"; bare dates are inclusive whole days.
std::optional<TimeWindow> parse_window(std::string_view text);

}  // namespace goxlens
