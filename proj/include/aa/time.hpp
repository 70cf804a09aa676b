#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aa {

// All timestamps are UTC with second precision.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline Timestamp from_unix(std::int64_t seconds) { return Timestamp{Seconds{seconds}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

Timestamp now_utc();

// "2013-05-02T14:30:11Z"
std::string format_iso8601(Timestamp t);

struct ParsedTime {
  Timestamp utc;
  bool had_zone = false;
};

// Accepts "YYYY-MM-DD[T| ]HH:MM[:SS]" with an optional "Z" or "+hh[:]mm" suffix.
// Naive values are shifted by `naive_offset` (the zone they were written in).
std::optional<ParsedTime> parse_timestamp(std::string_view text, Seconds naive_offset = Seconds{0});

// Strict variant used for wire parameters; naive values are read as UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// "900", "900s", "15m", "2h"; rejects negatives.
std::optional<Seconds> parse_duration(std::string_view text);

// "Z", "UTC", "+02:00", "-0300", "+2"
std::optional<Seconds> parse_utc_offset(std::string_view text);

}  // namespace aa
