#include "goxlens/time.hpp"

#include <charconv>
#include <cstdio>

namespace goxlens {

// Howard Hinnant's civil-from-days algorithms.
Day days_from_civil(CivilDate d) {
  const int y = d.year - (d.month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = d.month > 2 ? d.month - 3 : d.month + 9;
  const unsigned doy = (153 * mp + 2) / 5 + d.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<Day>(era) * 146097 + static_cast<Day>(doe) - 719468;
}

CivilDate civil_from_days(Day z) {
  z += 719468;
  const Day era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const Day y = static_cast<Day>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2 ? 1 : 0)), m, d};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
  return kDays[m - 1];
}

std::optional<Day> parse_date_prefix(std::string_view s) {
  int y, m, d;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || static_cast<unsigned>(d) > days_in_month(y, static_cast<unsigned>(m)))
    return std::nullopt;
  return days_from_civil({y, static_cast<unsigned>(m), static_cast<unsigned>(d)});
}

}  // namespace

std::optional<Day> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10) return std::nullopt;
  return parse_date_prefix(text);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 && text.size() != 16) return std::nullopt;
  auto day = parse_date_prefix(text);
  if (!day || (text[10] != ' ' && text[10] != 'T') || text[13] != ':') return std::nullopt;
  int hh, mm, ss = 0;
  if (!read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm)) return std::nullopt;
  if (text.size() == 19 && (text[16] != ':' || !read_int(text, 17, 2, ss))) return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return *day * kSecondsPerDay + hh * 3600 + mm * 60 + ss;
}

std::optional<Timestamp> parse_date_or_timestamp(std::string_view text) {
  if (auto d = parse_date(text)) return *d * kSecondsPerDay;
  return parse_timestamp(text);
}

std::string format_date(Day d) {
  const CivilDate c = civil_from_days(d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const Day d = day_of(t);
  const Timestamp s = t - d * kSecondsPerDay;
  char buf[16];
  std::snprintf(buf, sizeof buf, " %02d:%02d:%02d", static_cast<int>(s / 3600), static_cast<int>(s / 60 % 60),
                static_cast<int>(s % 60));
  return format_date(d) + buf;
}

TimeWindow default_wash_window() {
  const Day start = days_from_civil({2011, 6, 26});
  const Day end = days_from_civil({2013, 5, 20});
  return {start * kSecondsPerDay, end * kSecondsPerDay + kSecondsPerDay - 1};
}

std::optional<TimeWindow> parse_window(std::string_view text) {
  const auto sep = text.find("..");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto lhs = text.substr(0, sep);
  const auto rhs = text.substr(sep + 2);
  std::optional<Timestamp> start = parse_date_or_timestamp(lhs);
  std::optional<Timestamp> end;
  if (auto d = parse_date(rhs)) {
    end = *d * kSecondsPerDay + kSecondsPerDay - 1;
  } else {
    end = parse_timestamp(rhs);
  }
  if (!start || !end || *end < *start) return std::nullopt;
  return TimeWindow{*start, *end};
}

}  // namespace goxlens
