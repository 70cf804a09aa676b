#pragma once

// key = value configuration files with optional [section] headers. Keys before
// the first header are global; repeated sections keep their order (miner
// source specs use one [source] section per input).

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aa/store.hpp"

namespace aa {

class Config {
 public:
  using Values = std::map<std::string, std::string>;

  struct Section {
    std::string name;
    Values values;
  };

  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  // AA_PORT=9000 overrides key "port"; AA_JOURNAL overrides "journal".
  void apply_env(std::string_view prefix = "AA_");
  void apply_env(const std::map<std::string, std::string>& env, std::string_view prefix = "AA_");

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  std::optional<Seconds> duration(std::string_view key) const;
  std::optional<long long> integer(std::string_view key) const;

  const Values& values() const { return values_; }
  std::vector<Section> sections(std::string_view name) const;

 private:
  Values values_;
  std::vector<Section> sections_;
};

// "a, b ,c" -> {"a","b","c"} (lowercased)
std::set<std::string> parse_word_set(std::string_view csv);

std::map<std::string, std::string> current_environment();

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path journal = "aa-journal.jsonl";
  server::ServerSettings settings;
};

// Keys: host, port, journal, slot, tolerance, gap, report_latest, lexicon,
// ubiquitous, promo, greetings, min_words.
ServerConfig server_config_from(const Config& config);

}  // namespace aa
