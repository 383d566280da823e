#include <charconv>
#include <chrono>
#include <cstdio>

#include "multiseg/series.hpp"

namespace multiseg {
namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;

  // integer epoch milliseconds
  const bool integral = text.find_first_not_of("-0123456789") == std::string_view::npos;
  if (integral) {
    Timestamp value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
  }

  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (text.size() < 19 || !read_digits(text, 0, 4, year) || text[4] != '-' ||
      !read_digits(text, 5, 2, month) || text[7] != '-' || !read_digits(text, 8, 2, day) ||
      (text[10] != 'T' && text[10] != ' ') || !read_digits(text, 11, 2, hour) ||
      text[13] != ':' || !read_digits(text, 14, 2, minute) || text[16] != ':' ||
      !read_digits(text, 17, 2, second)) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int d = digits; d < 3; ++d) millis *= 10;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return ((static_cast<Timestamp>(days_since_epoch) * 24 + hour) * 60 + minute) * 60000 +
         static_cast<Timestamp>(second) * 1000 + millis;
}

std::string format_timestamp(Timestamp ms) {
  using namespace std::chrono;
  constexpr Timestamp kDay = 86'400'000;
  Timestamp days = ms / kDay;
  Timestamp rem = ms % kDay;
  if (rem < 0) {
    rem += kDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const auto hour = rem / 3'600'000;
  const auto minute = rem / 60'000 % 60;
  const auto second = rem / 1000 % 60;
  const auto millis = rem % 1000;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(hour),
                static_cast<long long>(minute), static_cast<long long>(second),
                static_cast<long long>(millis));
  return buf;
}

}  // namespace multiseg
