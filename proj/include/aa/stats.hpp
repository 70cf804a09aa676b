#pragma once

// Corpus statistics: counts by kind and user, calendar histograms, token and
// stem frequency tables, and the per-shout word co-occurrence network.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "aa/store.hpp"

namespace aa::stats {

struct ActivityStats {
  std::map<std::string, std::size_t> by_kind;
  std::map<std::string, std::size_t> by_user;
  std::size_t total = 0;
  std::size_t users = 0;
  std::size_t sessions = 0;
  std::size_t screencasts = 0;
  std::size_t reviews = 0;
  std::optional<double> mean_score;
};

ActivityStats summarize(const server::StoreSnapshot& snapshot);
nlohmann::json to_json(const ActivityStats& s);

enum class Scale { SecondOfMinute, MinuteOfHour, HourOfDay, DayOfWeek, DayOfMonth, Month, Year };

// "second", "minute", "hour", "weekday", "day", "month", "year"
std::optional<Scale> scale_from_string(std::string_view s);
std::string_view to_string(Scale s);

struct TemporalHistogram {
  Scale scale = Scale::HourOfDay;
  std::vector<std::pair<std::string, std::size_t>> bins;
};

// UTC calendar fields. Year bins span the earliest to the latest year.
TemporalHistogram histogram(std::span<const Timestamp> times, Scale scale);
TemporalHistogram histogram(std::span<const Shout> shouts, Scale scale);
nlohmann::json to_json(const TemporalHistogram& h);

// Lowercases, splits on non-alphanumerics (keeping inner '-' and '\''), drops
// stopwords, numbers of at most two digits, and '#'/'+' tag tokens.
std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords = {});

using Stemmer = std::function<std::string(const std::string&)>;

std::string identity_stem(const std::string& token);
// Naive suffix stripper: ções/ção -> ç, then ing, ed, es, s; keeps at least 3 bytes.
std::string suffix_stem(const std::string& token);

struct TokenOptions {
  std::set<std::string> stopwords;
  bool exclude_tags = true;
  bool exclude_machine = true;  // lost-timeslot records
};

std::set<std::string> default_stopwords();

struct TokenTable {
  std::map<std::string, std::size_t> tokens;
  std::map<std::string, std::size_t> radicals;
  std::size_t vocabulary_size = 0;
  std::size_t token_count = 0;
};

TokenTable token_table(std::span<const Shout> shouts, const Stemmer& stemmer = suffix_stem,
                       const TokenOptions& options = {});
nlohmann::json to_json(const TokenTable& t);

// Tokens of one record under `options`, or nothing when the record is excluded.
std::optional<std::vector<std::string>> record_tokens(const Shout& shout, const TokenOptions& options);

struct CooccurrenceGraph {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::size_t> edges;  // first < second
  std::map<std::string, std::size_t> degree;
  std::map<std::string, std::size_t> strength;
  std::size_t components = 0;

  std::size_t weight(const std::string& a, const std::string& b) const;
};

CooccurrenceGraph cooccurrence(std::span<const Shout> shouts, const TokenOptions& options = {});
nlohmann::json to_json(const CooccurrenceGraph& g);

}  // namespace aa::stats
