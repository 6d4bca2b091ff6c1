#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace testbed {

using Micros = std::chrono::microseconds;
/// UTC instant with microsecond resolution.
using Timestamp = std::chrono::sys_time<Micros>;

inline Timestamp from_epoch_us(std::int64_t us) { return Timestamp{Micros{us}}; }
inline std::int64_t epoch_us(Timestamp ts) { return ts.time_since_epoch().count(); }
inline double seconds_between(Timestamp a, Timestamp b) {
  return std::chrono::duration<double>(b - a).count();
}

/// Minutes past midnight, written as H:MM in 24-hour form.
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;
  constexpr explicit TimeOfDay(int minutes) : minutes_(minutes) {}

  static std::optional<TimeOfDay> try_parse(std::string_view text);
  std::string to_string() const;

  constexpr int minutes() const noexcept { return minutes_; }
  friend constexpr auto operator<=>(TimeOfDay, TimeOfDay) = default;

 private:
  int minutes_ = 0;
};

std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

/// YYYY-MM-DDTHH:MM:SS[.ffffff](Z|+HH:MM|-HH:MM). A missing offset means UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);
/// Always rendered in UTC with a trailing Z and six fractional digits.
std::string format_iso8601(Timestamp ts);

}  // namespace testbed
