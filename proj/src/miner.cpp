#include "aa/miner.hpp"

#include <boost/regex.hpp>

#include <fstream>
#include <sstream>

#include "aa/config.hpp"
#include "aa/parser.hpp"
#include "aa/store.hpp"
#include "aa/text.hpp"

namespace aa::miner {

using nlohmann::json;

namespace {

constexpr std::string_view kPrefix = ";aa ";

boost::regex compile(const std::string& pattern) {
  try {
    return boost::regex(pattern, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw Error(ErrorCode::BadPattern, std::string("invalid pattern: ") + e.what());
  }
}

bool has_group(const boost::regex& re, std::string_view name) {
  const auto subs = re.get_named_subs();
  return subs && subs->get_id(name.data(), name.data() + name.size()) >= 0;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());
  return buf.str();
}

std::optional<Timestamp> parse_when(std::string_view text, Seconds zone) {
  auto parsed = parse_timestamp(trim(text), zone);
  if (!parsed) return std::nullopt;
  return parsed->utc;
}

// Dotted lookup: "user.nick" reaches into nested objects.
const json* lookup(const json& record, const std::string& path) {
  const json* node = &record;
  for (const auto& part : split(path, '.')) {
    if (!node->is_object()) return nullptr;
    auto it = node->find(part);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

std::optional<Timestamp> json_time(const json& value, Seconds zone) {
  if (value.is_string()) return parse_when(value.get<std::string>(), zone);
  if (value.is_number_integer()) return from_unix(value.get<std::int64_t>());
  if (value.is_number_float()) return from_unix(static_cast<std::int64_t>(value.get<double>()));
  if (value.is_object()) {
    // Document-store exports: {"$date": "..."} or {"$date": millis}.
    auto it = value.find("$date");
    if (it == value.end()) return std::nullopt;
    if (it->is_number()) return from_unix(it->get<std::int64_t>() / 1000);
    if (it->is_object() && it->contains("$numberLong")) {
      try {
        return from_unix(std::stoll(it->at("$numberLong").get<std::string>()) / 1000);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    return json_time(*it, zone);
  }
  return std::nullopt;
}

std::optional<std::string> json_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return value.dump();
  return std::nullopt;
}

// Nicks go through the same normalization as live shouts; a nick that does not
// survive it makes the record malformed.
void add_candidate(ParsedSource& out, std::string_view nick, std::string message, Timestamp created) {
  Shout s;
  try {
    s.nick = normalize_nick(nick);
  } catch (const Error&) {
    ++out.skipped;
    return;
  }
  s.message = std::move(message);
  s.created = created;
  s.client_created = created;
  s.source = Source::Mined;
  out.candidates.push_back(std::move(s));
}

void add_record(const SourceSpec& spec, const json& record, ParsedSource& out) {
  ++out.scanned;
  const json* nick = record.is_object() ? lookup(record, spec.mapping.at("nick")) : nullptr;
  const json* message = record.is_object() ? lookup(record, spec.mapping.at("message")) : nullptr;
  const json* created = record.is_object() ? lookup(record, spec.mapping.at("created")) : nullptr;
  if (!nick || !message || !created) {
    ++out.skipped;
    return;
  }
  auto n = json_text(*nick);
  auto m = json_text(*message);
  auto t = json_time(*created, spec.timezone);
  if (!n || !m || !t || trim(*n).empty() || trim(*m).empty()) {
    ++out.skipped;
    return;
  }
  add_candidate(out, *n, *m, *t);
}

void parse_chat_log(const SourceSpec& spec, std::string_view content, ParsedSource& out) {
  const auto re = compile(spec.pattern);
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.scanned;
    boost::smatch m;
    if (!boost::regex_search(line, m, re)) {
      ++out.skipped;
      continue;
    }
    auto when = parse_when(m["timestamp"].str(), spec.timezone);
    const auto nick = m["nick"].str();
    const auto text = m["text"].str();
    if (!when || trim(nick).empty() || trim(text).empty()) {
      ++out.skipped;
      continue;
    }
    add_candidate(out, nick, text, *when);
  }
}

void parse_json_dump(const SourceSpec& spec, std::string_view content, ParsedSource& out) {
  if (trim(content).empty()) return;
  json whole;
  bool single_document = true;
  try {
    whole = json::parse(content);
  } catch (const json::exception&) {
    single_document = false;
  }
  if (single_document) {
    if (whole.is_array()) {
      for (const auto& record : whole) add_record(spec, record, out);
    } else {
      add_record(spec, whole, out);
    }
    return;
  }
  // JSON lines
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      add_record(spec, json::parse(line), out);
    } catch (const json::exception&) {
      ++out.scanned;
      ++out.skipped;
    }
  }
}

void parse_tabular(const SourceSpec& spec, std::string_view content, ParsedSource& out) {
  const auto rows = parse_delimited(content, spec.delimiter);
  if (rows.empty()) return;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) column[std::string(trim(rows[0][i]))] = i;
  auto index_of = [&](const std::string& field) {
    auto it = column.find(spec.mapping.at(field));
    if (it == column.end()) {
      throw Error(ErrorCode::BadMapping, "column '" + spec.mapping.at(field) + "' not in header");
    }
    return it->second;
  };
  const auto nick_col = index_of("nick");
  const auto message_col = index_of("message");
  const auto created_col = index_of("created");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    ++out.scanned;
    const auto needed = std::max({nick_col, message_col, created_col});
    if (row.size() <= needed) {
      ++out.skipped;
      continue;
    }
    std::optional<Timestamp> when = parse_when(row[created_col], spec.timezone);
    if (!when) {
      const auto digits = trim(row[created_col]);
      if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string_view::npos) {
        when = from_unix(std::stoll(std::string(digits)));
      }
    }
    if (!when || trim(row[nick_col]).empty() || trim(row[message_col]).empty()) {
      ++out.skipped;
      continue;
    }
    add_candidate(out, trim(row[nick_col]), row[message_col], *when);
  }
}

SourceKind kind_from_string(std::string_view s) {
  const auto k = to_lower(trim(s));
  if (k == "chatlog" || k == "chat" || k == "irc" || k == "log") return SourceKind::ChatLog;
  if (k == "json" || k == "jsonl" || k == "jsondump") return SourceKind::JsonDump;
  if (k == "csv" || k == "tsv" || k == "tabular" || k == "tabulardump") return SourceKind::TabularDump;
  throw Error(ErrorCode::BadConfig, "unknown source kind '" + std::string(s) + "'");
}

}  // namespace

void SourceSpec::validate() const {
  if (kind == SourceKind::ChatLog) {
    const auto re = compile(pattern);
    for (std::string_view group : {"timestamp", "nick", "text"}) {
      if (!has_group(re, group)) {
        throw Error(ErrorCode::BadPattern, "pattern lacks the named group '" + std::string(group) + "'");
      }
    }
    return;
  }
  for (std::string_view field : {"nick", "message", "created"}) {
    auto it = mapping.find(std::string(field));
    if (it == mapping.end() || trim(it->second).empty()) {
      throw Error(ErrorCode::BadMapping, "mapping lacks the field '" + std::string(field) + "'");
    }
  }
}

ParsedSource parse_text(const SourceSpec& spec, std::string_view content) {
  spec.validate();
  ParsedSource out;
  switch (spec.kind) {
    case SourceKind::ChatLog:
      parse_chat_log(spec, content, out);
      break;
    case SourceKind::JsonDump:
      parse_json_dump(spec, content, out);
      break;
    case SourceKind::TabularDump:
      parse_tabular(spec, content, out);
      break;
  }
  return out;
}

ParsedSource parse_source(const SourceSpec& spec) {
  spec.validate();
  return parse_text(spec, read_file(spec.path));
}

std::optional<SelectMode> select_mode_from_string(std::string_view s) {
  const auto m = to_lower(trim(s));
  if (m == "prefix") return SelectMode::Prefix;
  if (m == "tags") return SelectMode::Tags;
  if (m == "all") return SelectMode::All;
  return std::nullopt;
}

std::vector<Shout> select_shouts(std::vector<Shout> candidates, SelectMode mode,
                                 const std::set<std::string>& ubiquitous) {
  std::vector<Shout> out;
  for (auto& s : candidates) {
    if (mode == SelectMode::Prefix) {
      if (!std::string_view(s.message).starts_with(kPrefix)) continue;
      s.message.erase(0, kPrefix.size());
      if (trim(s.message).empty()) continue;
    } else if (mode == SelectMode::Tags) {
      const auto tags = parser::extract_tags(s.message).tags;
      const bool marked = std::any_of(tags.begin(), tags.end(), [&](const Tag& t) {
        return t.form != TagForm::Word && ubiquitous.count(t.name);
      });
      if (!marked) continue;
    }
    try {
      parser::classify(s);
    } catch (const Error&) {
      continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string dedup_key(const Shout& s, DedupKey key) {
  const auto text = std::string(trim_right(s.message));
  if (key == DedupKey::Text) return text;
  return s.nick + "\t" + text;
}

std::set<std::string> corpus_of(const std::vector<Shout>& stored, DedupKey key) {
  std::set<std::string> out;
  for (const auto& s : stored) out.insert(dedup_key(s, key));
  return out;
}

DedupResult dedup(const std::vector<Shout>& candidates, const std::set<std::string>& corpus, DedupKey key) {
  DedupResult r;
  std::set<std::string> known;
  for (const auto& c : corpus) known.insert(std::string(trim_right(c)));
  for (const auto& s : candidates) {
    auto k = dedup_key(s, key);
    if (known.count(k)) {
      r.discarded.push_back(s);
      continue;
    }
    known.insert(std::move(k));
    r.kept.push_back(s);
  }
  r.report.scanned = candidates.size();
  r.report.candidates = candidates.size();
  r.report.duplicates_discarded = r.discarded.size();
  r.report.kept = r.kept.size();
  return r;
}

json to_json(const MiningReport& report) {
  auto counts = [](const auto& c) {
    return json{{"scanned", c.scanned},
                {"skipped", c.skipped},
                {"candidates", c.candidates},
                {"duplicates_discarded", c.duplicates_discarded},
                {"kept", c.kept}};
  };
  json j = counts(report);
  j["per_source"] = json::object();
  for (const auto& [name, c] : report.per_source) j["per_source"][name] = counts(c);
  return j;
}

std::vector<SourceSpec> load_specs(const std::filesystem::path& spec_file) {
  const auto config = Config::load(spec_file);
  const auto base = spec_file.parent_path();
  std::vector<SourceSpec> out;
  for (const auto& section : config.sections("source")) {
    const auto& v = section.values;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
      auto it = v.find(key);
      if (it == v.end()) return std::nullopt;
      return it->second;
    };
    SourceSpec spec;
    if (auto k = get("kind")) spec.kind = kind_from_string(*k);
    auto path = get("path");
    if (!path) throw Error(ErrorCode::BadConfig, "source section without a path");
    spec.path = std::filesystem::path(*path);
    if (spec.path.is_relative()) spec.path = base / spec.path;
    if (auto n = get("name")) spec.name = *n;
    if (auto p = get("pattern")) spec.pattern = *p;
    if (auto d = get("delimiter")) {
      const auto lowered = to_lower(*d);
      spec.delimiter = (lowered == "tab" || lowered == "\\t") ? '\t' : (d->empty() ? ',' : (*d)[0]);
    } else if (to_lower(get("kind").value_or("")) == "tsv" || spec.path.extension() == ".tsv") {
      spec.delimiter = '\t';
    }
    if (auto tz = get("timezone")) {
      auto offset = parse_utc_offset(*tz);
      if (!offset) throw Error(ErrorCode::BadConfig, "bad timezone '" + *tz + "'");
      spec.timezone = *offset;
    }
    for (const auto& field : {"nick", "message", "created"}) {
      if (auto m = get(std::string("map.") + field)) spec.mapping[field] = *m;
    }
    spec.validate();
    out.push_back(std::move(spec));
  }
  return out;
}

MineOutcome mine(const std::vector<SourceSpec>& specs, const MineOptions& options,
                 const std::set<std::string>& corpus, server::Store* store) {
  MineOutcome outcome;
  auto& report = outcome.report;
  std::vector<Shout> selected;
  std::vector<std::string> origin;
  for (const auto& spec : specs) {
    auto parsed = parse_source(spec);
    auto& counts = report.per_source[spec.label()];
    counts.scanned += parsed.scanned;
    counts.skipped += parsed.skipped;
    auto chosen = select_shouts(std::move(parsed.candidates), options.mode, options.ubiquitous);
    counts.candidates += chosen.size();
    for (auto& s : chosen) {
      selected.push_back(std::move(s));
      origin.push_back(spec.label());
    }
  }

  std::set<std::string> known;
  for (const auto& c : corpus) known.insert(std::string(trim_right(c)));
  for (std::size_t i = 0; i < selected.size(); ++i) {
    auto& counts = report.per_source[origin[i]];
    auto k = dedup_key(selected[i], options.key);
    if (known.count(k)) {
      ++counts.duplicates_discarded;
      continue;
    }
    known.insert(std::move(k));
    ++counts.kept;
    outcome.kept.push_back(selected[i]);
  }
  for (const auto& [name, c] : report.per_source) {
    report.scanned += c.scanned;
    report.skipped += c.skipped;
    report.candidates += c.candidates;
    report.duplicates_discarded += c.duplicates_discarded;
    report.kept += c.kept;
  }
  if (!options.dry_run && store && !outcome.kept.empty()) {
    outcome.imported = store->import_mined(outcome.kept);
  }
  return outcome;
}

std::vector<std::vector<std::string>> parse_delimited(std::string_view content, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace aa::miner
