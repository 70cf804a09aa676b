#include "aa/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "aa/text.hpp"

extern char** environ;

namespace aa {

Config Config::parse(std::string_view text) {
  Config config;
  Section* current = nullptr;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::BadConfig, "unterminated section header on line " + std::to_string(line_no));
      }
      config.sections_.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}});
      current = &config.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadConfig, "expected key = value on line " + std::to_string(line_no));
    }
    auto key = to_lower(trim(line.substr(0, eq)));
    auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorCode::BadConfig, "empty key on line " + std::to_string(line_no));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (current) {
      current->values[std::move(key)] = std::move(value);
    } else {
      config.values_[std::move(key)] = std::move(value);
    }
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::apply_env(std::string_view prefix) { apply_env(current_environment(), prefix); }

void Config::apply_env(const std::map<std::string, std::string>& env, std::string_view prefix) {
  for (const auto& [name, value] : env) {
    if (name.size() > prefix.size() && name.starts_with(prefix)) {
      values_[to_lower(name.substr(prefix.size()))] = value;
    }
  }
}

std::optional<std::string> Config::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(std::string_view key, std::string fallback) const {
  return get(key).value_or(std::move(fallback));
}

std::optional<Seconds> Config::duration(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  auto d = parse_duration(*v);
  if (!d) throw Error(ErrorCode::BadConfig, "bad duration for " + std::string(key) + ": " + *v);
  return d;
}

std::optional<long long> Config::integer(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw Error(ErrorCode::BadConfig, "bad integer for " + std::string(key) + ": " + *v);
  }
  return out;
}

std::vector<Config::Section> Config::sections(std::string_view name) const {
  std::vector<Section> out;
  for (const auto& s : sections_) {
    if (s.name == name) out.push_back(s);
  }
  return out;
}

std::set<std::string> parse_word_set(std::string_view csv) {
  std::set<std::string> out;
  for (const auto& item : split(csv, ',')) {
    auto word = to_lower(trim(item));
    while (!word.empty() && (word.front() == '#' || word.front() == '+')) word.erase(0, 1);
    if (!word.empty()) out.insert(std::move(word));
  }
  return out;
}

std::map<std::string, std::string> current_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return out;
}

ServerConfig server_config_from(const Config& config) {
  ServerConfig out;
  out.host = config.get_or("host", out.host);
  if (auto port = config.integer("port")) out.port = static_cast<int>(*port);
  if (auto journal = config.get("journal")) out.journal = *journal;
  auto& s = out.settings;
  if (auto d = config.duration("slot")) s.slot = *d;
  if (auto d = config.duration("tolerance")) s.tolerance = *d;
  if (auto d = config.duration("gap")) s.gap = *d;
  if (auto n = config.integer("report_latest")) s.report_latest = static_cast<std::size_t>(*n);
  if (auto v = config.get("lexicon")) s.parser.word_lexicon = parse_word_set(*v);
  if (auto v = config.get("ubiquitous")) s.parser.ubiquitous = parse_word_set(*v);
  if (auto v = config.get("promo")) s.parser.promo_keywords = parse_word_set(*v);
  if (auto v = config.get("greetings")) s.parser.greetings = parse_word_set(*v);
  if (auto n = config.integer("min_words")) s.parser.min_words = static_cast<std::size_t>(*n);
  try {
    session::SlotGrid{Timestamp{}, s.slot, s.tolerance}.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  return out;
}

}  // namespace aa
