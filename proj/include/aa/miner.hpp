#pragma once

// Harvests shouts from historical sources: chat logs read through a line
// pattern, and JSON or CSV/TSV dumps read through a field mapping. Candidates
// are filtered by prefix or ubiquitous tag and deduplicated against the texts
// already stored.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aa/model.hpp"

namespace aa::server {
class Store;
}

namespace aa::miner {

enum class SourceKind { ChatLog, JsonDump, TabularDump };

inline constexpr std::string_view kDefaultChatPattern =
    R"(^\[(?<timestamp>\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}:\d{2})\]\s+<(?<nick>[^>\s]+)>\s(?<text>.*)$)";

struct SourceSpec {
  SourceKind kind = SourceKind::ChatLog;
  std::filesystem::path path;
  std::string name;  // label in the report; defaults to the path
  std::string pattern{kDefaultChatPattern};
  // Shout field ("nick", "message", "created") -> source field name.
  std::map<std::string, std::string> mapping{{"nick", "nick"}, {"message", "message"}, {"created", "created"}};
  Seconds timezone{0};
  char delimiter = ',';  // TabularDump; '\t' for TSV

  // Throws BadPattern or BadMapping.
  void validate() const;
  std::string label() const { return name.empty() ? path.string() : name; }
};

struct ParsedSource {
  std::vector<Shout> candidates;
  std::size_t scanned = 0;
  std::size_t skipped = 0;
};

// Throws UnreadableSource, BadPattern or BadMapping. Malformed lines/records are
// counted in `skipped`.
ParsedSource parse_source(const SourceSpec& spec);
ParsedSource parse_text(const SourceSpec& spec, std::string_view content);

enum class SelectMode { Prefix, Tags, All };

std::optional<SelectMode> select_mode_from_string(std::string_view s);

// Prefix strips ";aa "; Tags keeps messages carrying any of `ubiquitous`.
std::vector<Shout> select_shouts(std::vector<Shout> candidates, SelectMode mode,
                                 const std::set<std::string>& ubiquitous = {"aao0"});

// Text keying discards on message text alone; NickText also requires the same nick.
enum class DedupKey { Text, NickText };

struct SourceCounts {
  std::size_t scanned = 0;
  std::size_t skipped = 0;
  std::size_t candidates = 0;
  std::size_t duplicates_discarded = 0;
  std::size_t kept = 0;
};

struct MiningReport {
  std::size_t scanned = 0;
  std::size_t skipped = 0;
  std::size_t candidates = 0;
  std::size_t duplicates_discarded = 0;
  std::size_t kept = 0;
  std::map<std::string, SourceCounts> per_source;
};

nlohmann::json to_json(const MiningReport& report);

struct DedupResult {
  std::vector<Shout> kept;
  std::vector<Shout> discarded;
  MiningReport report;
};

// Comparison ignores trailing whitespace. Corpus entries for NickText keying
// are "nick\ttext". First occurrence wins among candidates.
DedupResult dedup(const std::vector<Shout>& candidates, const std::set<std::string>& corpus,
                  DedupKey key = DedupKey::Text);

std::string dedup_key(const Shout& s, DedupKey key);

// Corpus keys of everything stored, in the requested keying.
std::set<std::string> corpus_of(const std::vector<Shout>& stored, DedupKey key);

// One [source] section per input: kind, path, pattern, delimiter, timezone,
// name, and map.nick / map.message / map.created. Relative paths resolve
// against the directory of the file that lists them.
std::vector<SourceSpec> load_specs(const std::filesystem::path& spec_file);

struct MineOptions {
  SelectMode mode = SelectMode::Prefix;
  std::set<std::string> ubiquitous{"aao0"};
  DedupKey key = DedupKey::Text;
  bool dry_run = false;
};

struct MineOutcome {
  MiningReport report;
  std::vector<Shout> kept;
  std::vector<Shout> imported;
};

// Full pipeline: parse every source, select, dedup against the store's
// corpus, then import unless dry_run. `store` may be null for a dry run.
MineOutcome mine(const std::vector<SourceSpec>& specs, const MineOptions& options,
                 const std::set<std::string>& corpus, server::Store* store);

// Minimal CSV/TSV record reader with RFC 4180 quoting.
std::vector<std::vector<std::string>> parse_delimited(std::string_view content, char delimiter);

}  // namespace aa::miner
