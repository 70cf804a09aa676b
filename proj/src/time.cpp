#include "aa/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace aa {

namespace {

bool read_int(std::string_view s, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  for (std::size_t i = 0; i < width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, out);
  if (ec != std::errc{}) return false;
  pos += width;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Timestamp now_utc() {
  return std::chrono::floor<Seconds>(std::chrono::system_clock::now());
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Seconds> parse_utc_offset(std::string_view text) {
  text = trim(text);
  if (text == "Z" || text == "z" || text == "UTC" || text == "utc" || text == "GMT") return Seconds{0};
  if (text.empty() || (text[0] != '+' && text[0] != '-')) return std::nullopt;
  const int sign = text[0] == '-' ? -1 : 1;
  std::size_t pos = 1;
  int hours = 0;
  int minutes = 0;
  if (text.size() == 2) {
    if (!read_int(text, pos, 1, hours)) return std::nullopt;
  } else {
    if (!read_int(text, pos, 2, hours)) return std::nullopt;
    if (pos < text.size()) {
      expect(text, pos, ':');
      if (!read_int(text, pos, 2, minutes)) return std::nullopt;
    }
  }
  if (pos != text.size() || hours > 23 || minutes > 59) return std::nullopt;
  return Seconds{sign * (hours * 3600 + minutes * 60)};
}

std::optional<ParsedTime> parse_timestamp(std::string_view text, Seconds naive_offset) {
  using namespace std::chrono;
  text = trim(text);
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, pos, 4, y) || !expect(text, pos, '-') || !read_int(text, pos, 2, mo) ||
      !expect(text, pos, '-') || !read_int(text, pos, 2, d)) {
    return std::nullopt;
  }
  if (!expect(text, pos, 'T') && !expect(text, pos, ' ')) return std::nullopt;
  if (!read_int(text, pos, 2, h) || !expect(text, pos, ':') || !read_int(text, pos, 2, mi)) {
    return std::nullopt;
  }
  if (expect(text, pos, ':') && !read_int(text, pos, 2, s)) return std::nullopt;
  // Fractional seconds are truncated.
  if (expect(text, pos, '.')) {
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;

  ParsedTime out;
  Timestamp local = sys_days{ymd} + hours{h} + minutes{mi} + Seconds{s};
  const auto rest = text.substr(pos);
  if (rest.empty()) {
    out.utc = local - naive_offset;
    return out;
  }
  auto zone = parse_utc_offset(rest);
  if (!zone) return std::nullopt;
  out.utc = local - *zone;
  out.had_zone = true;
  return out;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  auto parsed = parse_timestamp(text);
  if (!parsed) return std::nullopt;
  return parsed->utc;
}

std::optional<Seconds> parse_duration(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::int64_t scale = 1;
  switch (text.back()) {
    case 's': scale = 1; text.remove_suffix(1); break;
    case 'm': scale = 60; text.remove_suffix(1); break;
    case 'h': scale = 3600; text.remove_suffix(1); break;
    default: break;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) return std::nullopt;
  return Seconds{value * scale};
}

}  // namespace aa
