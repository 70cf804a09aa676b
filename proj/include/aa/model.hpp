#pragma once

// Shared domain types: shouts, users, sessions, reviews and their
// classification vocabulary. No I/O lives here.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aa/time.hpp"

namespace aa {

enum class ErrorCode {
  EmptyNick,
  EmptyMessage,
  BeforeAnchor,
  InvalidGrid,
  EmptySession,
  NotLost,
  DuplicateLostSlot,
  MixedUsers,
  UnsortedInput,
  NoEligibleValidator,
  SelfReview,
  ScoreOutOfRange,
  UnknownSession,
  NoOpenSession,
  BadFilter,
  BadUrl,
  BadPattern,
  BadMapping,
  UnreadableSource,
  BadConfig,
  BadRequest,
  JournalFailure,
  Network,
  ServerError,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

// Every recoverable failure in the library is reported as an Error carrying a
// machine-readable code; the HTTP layer maps codes onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Source { Http, Chat, Mined };

enum class DeviationKind { Advertising, ProductExhibitionism, IntroTest };

struct MessageKind {
  enum class Variant { Start, Stop, Push, Shout, LostTimeslot, Query };

  Variant variant = Variant::Shout;
  std::string topic;  // only for Query

  static MessageKind start() { return {Variant::Start, {}}; }
  static MessageKind stop() { return {Variant::Stop, {}}; }
  static MessageKind push() { return {Variant::Push, {}}; }
  static MessageKind shout() { return {Variant::Shout, {}}; }
  static MessageKind lost_timeslot() { return {Variant::LostTimeslot, {}}; }
  static MessageKind query(std::string topic) { return {Variant::Query, std::move(topic)}; }

  bool is(Variant v) const { return variant == v; }
  friend bool operator==(const MessageKind&, const MessageKind&) = default;
};

enum class TagForm { Hash, Plus, Word };
enum class TagScope { ShoutOnly, Session, UntilNextTag };

struct Tag {
  TagForm form = TagForm::Hash;
  std::string name;  // lowercase, no marker characters
  TagScope scope = TagScope::ShoutOnly;

  static Tag hash(std::string name) { return {TagForm::Hash, std::move(name), TagScope::ShoutOnly}; }
  static Tag plus(std::string name) { return {TagForm::Plus, std::move(name), TagScope::ShoutOnly}; }
  static Tag word(std::string name, TagScope scope = TagScope::UntilNextTag) {
    return {TagForm::Word, std::move(name), scope};
  }

  friend bool operator==(const Tag&, const Tag&) = default;
};

struct Shout {
  std::string id;
  std::string nick;
  std::string message;
  Timestamp created{};
  std::optional<Timestamp> client_created;
  Source source = Source::Http;
  MessageKind kind;
  std::vector<Tag> tags;
  std::optional<std::string> session_ref;
  std::optional<DeviationKind> deviation;

  friend bool operator==(const Shout&, const Shout&) = default;
};

// Users are keyed by their normalized primary nick.
struct User {
  std::string id;
  std::set<std::string> nicks;
  std::set<std::string> emails;

  friend bool operator==(const User&, const User&) = default;
};

struct ValidationReview {
  std::string session;
  std::string reviewer;
  double score = 0.0;
  std::optional<std::string> comment;
  Timestamp created{};

  friend bool operator==(const ValidationReview&, const ValidationReview&) = default;
};

enum class SessionOrigin { Explicit, Inferred };

inline constexpr Seconds kDefaultSlot{15 * 60};
inline constexpr Seconds kDefaultTolerance{5 * 60};
inline constexpr Seconds kDefaultGap{30 * 60};

struct Session {
  std::string id;
  std::string user;
  SessionOrigin origin = SessionOrigin::Explicit;
  Timestamp start{};
  Timestamp end{};
  Seconds slot_duration = kDefaultSlot;
  std::vector<std::string> shouts;  // ordered by created, then arrival
  std::optional<std::string> screencast;
  std::optional<ValidationReview> review;
  std::vector<std::int64_t> lost_slots;  // slots already recorded as lost
  bool open = false;

  friend bool operator==(const Session&, const Session&) = default;
};

// Trimmed, ASCII-lowercased handle. Throws EmptyNick.
std::string normalize_nick(std::string_view raw);

std::string_view to_string(Source s);
std::optional<Source> source_from_string(std::string_view s);
std::string_view to_string(DeviationKind d);
std::optional<DeviationKind> deviation_from_string(std::string_view s);
std::string_view to_string(TagForm f);
std::string_view to_string(TagScope s);
std::string_view to_string(SessionOrigin o);

// "shout", "start", ..., "query:tickets"
std::string to_string(const MessageKind& k);
std::optional<MessageKind> kind_from_string(std::string_view s);

// "#coding", "+django", "coding"
std::string display(const Tag& t);

}  // namespace aa
