#pragma once

// Server-side state: every mutation is journaled first and then applied with
// the same code path that replays the journal at startup, so live state and
// replayed state cannot drift apart.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aa/journal.hpp"
#include "aa/model.hpp"
#include "aa/parser.hpp"
#include "aa/session.hpp"

namespace aa::server {

using Clock = std::function<Timestamp()>;

struct ServerSettings {
  Seconds slot = kDefaultSlot;
  Seconds tolerance = kDefaultTolerance;
  Seconds gap = kDefaultGap;
  std::size_t report_latest = 20;
  parser::ParserConfig parser;
};

struct ShoutFilter {
  std::optional<std::string> nick;
  std::optional<Timestamp> since;
  std::optional<Timestamp> until;

  // Throws BadFilter on malformed timestamps or an inverted range.
  static ShoutFilter parse(std::optional<std::string> nick, std::optional<std::string> since,
                           std::optional<std::string> until);
  bool matches(const Shout& s) const;
};

enum class ListingFormat { Text, Json };

struct PushItem {
  std::string message;
  std::optional<Timestamp> client_created;
};

struct MessageResult {
  MessageKind kind;
  std::optional<Shout> shout;
  std::optional<Session> session;
  std::optional<session::ConformanceReport> conformance;
  std::vector<Shout> pushed;
  std::optional<std::string> validator;
  std::optional<std::string> note;  // machine-readable code, e.g. EmptySession
};

nlohmann::json to_json(const MessageResult& r);

struct StoreSnapshot {
  std::vector<Shout> shouts;      // journal order
  std::vector<Session> sessions;  // id order
  std::vector<User> users;        // id order
};

class Store {
 public:
  Store(std::unique_ptr<JournalBackend> journal, ServerSettings settings = {}, Clock clock = now_utc);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  Shout receive_shout(std::string_view nick, std::string_view message, Source source = Source::Http,
                      std::optional<Timestamp> client_created = std::nullopt);

  MessageResult receive_message(std::string_view nick, std::string_view message,
                                std::vector<PushItem> batch = {});

  Session attach_screencast(const std::string& session_id, std::string_view url);
  ValidationReview record_review(const std::string& session_id, std::string_view reviewer, double score,
                                 std::optional<std::string> comment);
  Shout emit_lost_timeslot(const std::string& session_id, std::int64_t slot);
  User assign_validator(const std::string& session_id, std::uint64_t seed) const;

  // Staged: either every shout becomes visible or none does.
  std::vector<Shout> import_mined(std::vector<Shout> shouts);

  std::vector<Shout> list(const ShoutFilter& filter = {}) const;
  std::string render_listing(ListingFormat format, const ShoutFilter& filter = {}) const;
  nlohmann::json report(std::optional<std::size_t> latest = std::nullopt) const;
  nlohmann::json session_view(const std::string& session_id) const;
  std::optional<Session> find_session(const std::string& session_id) const;
  std::optional<std::string> open_session_of(std::string_view nick) const;

  StoreSnapshot snapshot() const;
  std::set<std::string> corpus_texts() const;
  std::uint64_t last_seq() const;
  const ServerSettings& settings() const { return settings_; }

 private:
  Timestamp arrival();
  std::string next_shout_id() const;
  std::string next_session_id() const;
  JournalRecord make_record(std::optional<Shout> shout, std::optional<Session> session,
                            std::optional<ValidationReview> review, std::uint64_t offset = 0) const;
  void commit(std::vector<JournalRecord> records);
  void apply(const JournalRecord& record);
  Shout shout_record(std::string nick, std::string message, Timestamp created) const;
  std::vector<Shout> members_of(const Session& session) const;
  const Session& session_or_throw(const std::string& session_id) const;
  std::vector<User> users() const;

  std::unique_ptr<JournalBackend> journal_;
  ServerSettings settings_;
  Clock clock_;

  mutable std::shared_mutex mu_;
  std::vector<Shout> shouts_;
  std::map<std::string, std::size_t> shout_index_;
  std::map<std::string, Session> sessions_;
  std::map<std::string, std::string> open_by_user_;
  std::set<std::string> reviewers_;
  std::uint64_t seq_ = 0;
  Timestamp last_arrival_{};
};

std::string render_text(std::span<const Shout> shouts);
nlohmann::json render_json(std::span<const Shout> shouts);

// Parses the json listing back into shouts (for clients and duality checks).
std::vector<Shout> parse_listing(const nlohmann::json& listing);

bool valid_url(std::string_view url);

// Read-only replay of a journal file.
StoreSnapshot snapshot_of_journal(const std::filesystem::path& path, ServerSettings settings = {});

}  // namespace aa::server
