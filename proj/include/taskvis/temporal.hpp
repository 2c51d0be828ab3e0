#pragma once
// ISO-8601 date/datetime recognition. Values map to seconds since the Unix
// epoch (UTC) so temporal columns can be compared and ranged numerically.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

namespace taskvis::temporal {

// Bare four-digit integers count as years only inside this window, so that
// four-digit measurements (weights, prices) are not mistaken for dates.
inline constexpr int kMinBareYear = 1800;
inline constexpr int kMaxBareYear = 2100;

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  out = value;
  return true;
}

inline std::optional<double> epoch_seconds(int y, int m, int d, int hh, int mm, double ss, int offset_minutes) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  if (hh > 23 || mm > 59 || ss >= 61.0) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss - offset_minutes * 60.0;
}

}  // namespace detail

// Accepts YYYY (bare year, windowed), YYYY-MM, YYYY-MM-DD and
// YYYY-MM-DD[T| ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM|+HHMM].
inline std::optional<double> parse(std::string_view s) {
  std::size_t pos = 0;
  int year = 0;
  if (!detail::read_digits(s, pos, 4, year)) return std::nullopt;
  if (pos == s.size()) {
    if (year < kMinBareYear || year > kMaxBareYear) return std::nullopt;
    return detail::epoch_seconds(year, 1, 1, 0, 0, 0.0, 0);
  }
  int month = 1;
  int day = 1;
  if (s[pos++] != '-' || !detail::read_digits(s, pos, 2, month)) return std::nullopt;
  if (pos == s.size()) return detail::epoch_seconds(year, month, 1, 0, 0, 0.0, 0);
  if (s[pos++] != '-' || !detail::read_digits(s, pos, 2, day)) return std::nullopt;
  if (pos == s.size()) return detail::epoch_seconds(year, month, day, 0, 0, 0.0, 0);

  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  int hour = 0;
  int minute = 0;
  double second = 0.0;
  if (!detail::read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':' ||
      !detail::read_digits(s, pos, 2, minute)) {
    return std::nullopt;
  }
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    int whole = 0;
    if (!detail::read_digits(s, pos, 2, whole)) return std::nullopt;
    second = whole;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      double scale = 0.1;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        second += (s[pos] - '0') * scale;
        scale /= 10.0;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
  }
  int offset = 0;
  if (pos < s.size()) {
    const char z = s[pos++];
    if (z == 'Z') {
      if (pos != s.size()) return std::nullopt;
    } else if (z == '+' || z == '-') {
      int oh = 0;
      int om = 0;
      if (!detail::read_digits(s, pos, 2, oh)) return std::nullopt;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (!detail::read_digits(s, pos, 2, om) || pos != s.size()) return std::nullopt;
      offset = (oh * 60 + om) * (z == '-' ? -1 : 1);
    } else {
      return std::nullopt;
    }
  }
  return detail::epoch_seconds(year, month, day, hour, minute, second, offset);
}

}  // namespace taskvis::temporal
