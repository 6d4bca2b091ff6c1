#include "testbed/common/time.hpp"

#include <charconv>
#include <cstdio>

namespace testbed {

namespace {

// Exactly `width` ASCII digits.
std::optional<int> fixed_digits(std::string_view text, std::size_t width) {
  if (text.size() != width) return std::nullopt;
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

std::optional<TimeOfDay> TimeOfDay::try_parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2) return std::nullopt;
  auto hours = fixed_digits(text.substr(0, colon), colon);
  auto minutes = fixed_digits(text.substr(colon + 1), 2);
  if (!hours || !minutes || *hours > 24 || *minutes > 59) return std::nullopt;
  if (*hours == 24 && *minutes != 0) return std::nullopt;
  return TimeOfDay{*hours * 60 + *minutes};
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d:%02d", minutes_ / 60, minutes_ % 60);
  return buf;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = fixed_digits(text.substr(0, 4), 4);
  auto m = fixed_digits(text.substr(5, 2), 2);
  auto d = fixed_digits(text.substr(8, 2), 2);
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                   std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  if (text.size() < 19 || text[10] != 'T') return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date || text[13] != ':' || text[16] != ':') return std::nullopt;
  auto hh = fixed_digits(text.substr(11, 2), 2);
  auto mm = fixed_digits(text.substr(14, 2), 2);
  auto ss = fixed_digits(text.substr(17, 2), 2);
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;

  std::string_view rest = text.substr(19);
  std::int64_t frac_us = 0;
  if (!rest.empty() && rest.front() == '.') {
    std::size_t k = 1;
    std::int64_t scale = 100000;
    while (k < rest.size() && rest[k] >= '0' && rest[k] <= '9') {
      if (k > 6) return std::nullopt;  // finer than microseconds
      frac_us += (rest[k] - '0') * scale;
      scale /= 10;
      ++k;
    }
    if (k == 1) return std::nullopt;
    rest = rest.substr(k);
  }

  std::int64_t offset_minutes = 0;
  if (rest == "Z" || rest.empty()) {
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    auto oh = fixed_digits(rest.substr(1, 2), 2);
    auto om = fixed_digits(rest.substr(4, 2), 2);
    if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
    offset_minutes = (*oh * 60 + *om) * (rest[0] == '-' ? -1 : 1);
  } else {
    return std::nullopt;
  }

  using namespace std::chrono;
  auto local = sys_days{*date} + hours{*hh} + minutes{*mm} + seconds{*ss} + microseconds{frac_us};
  return time_point_cast<Micros>(local - minutes{offset_minutes});
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  auto day = floor<days>(ts);
  year_month_day ymd{day};
  hh_mm_ss<Micros> tod{ts - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()), static_cast<long long>(tod.subseconds().count()));
  return buf;
}

}  // namespace testbed
