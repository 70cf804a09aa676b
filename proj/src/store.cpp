#include "aa/store.hpp"

#include <algorithm>
#include <mutex>

#include "aa/json_io.hpp"
#include "aa/text.hpp"

namespace aa::server {

using nlohmann::json;

namespace {

void require_message(std::string_view message) {
  if (trim(message).empty()) throw Error(ErrorCode::EmptyMessage, "message is empty");
}

bool by_created(const Shout& a, const Shout& b) { return a.created < b.created; }

}  // namespace

// ---------------------------------------------------------------------------
// Filters and rendering

ShoutFilter ShoutFilter::parse(std::optional<std::string> nick, std::optional<std::string> since,
                               std::optional<std::string> until) {
  ShoutFilter f;
  if (nick && !trim(*nick).empty()) f.nick = normalize_nick(*nick);
  if (since) {
    f.since = parse_iso8601(*since);
    if (!f.since) throw Error(ErrorCode::BadFilter, "since is not an ISO 8601 timestamp");
  }
  if (until) {
    f.until = parse_iso8601(*until);
    if (!f.until) throw Error(ErrorCode::BadFilter, "until is not an ISO 8601 timestamp");
  }
  if (f.since && f.until && *f.since > *f.until) throw Error(ErrorCode::BadFilter, "since is after until");
  return f;
}

bool ShoutFilter::matches(const Shout& s) const {
  if (nick && s.nick != *nick) return false;
  if (since && s.created < *since) return false;
  if (until && s.created > *until) return false;
  return true;
}

std::string render_text(std::span<const Shout> shouts) {
  std::string out;
  for (const auto& s : shouts) {
    out += format_iso8601(s.created);
    out += '\t';
    out += s.nick;
    out += '\t';
    for (char c : s.message) out += (c == '\t' || c == '\n' || c == '\r') ? ' ' : c;
    out += '\n';
  }
  return out;
}

json render_json(std::span<const Shout> shouts) {
  auto out = json::array();
  for (const auto& s : shouts) out.push_back(listing_json(s));
  return out;
}

std::vector<Shout> parse_listing(const json& listing) {
  std::vector<Shout> out;
  for (const auto& item : listing) out.push_back(item.get<Shout>());
  return out;
}

bool valid_url(std::string_view url) {
  std::string_view rest;
  if (url.starts_with("http://")) {
    rest = url.substr(7);
  } else if (url.starts_with("https://")) {
    rest = url.substr(8);
  } else {
    return false;
  }
  if (rest.empty() || rest.front() == '/') return false;
  return std::none_of(url.begin(), url.end(), [](char c) {
    return is_space(c) || static_cast<unsigned char>(c) < 0x20 || c == '"' || c == '<' || c == '>';
  });
}

json to_json(const MessageResult& r) {
  json j;
  j["kind"] = to_string(r.kind);
  if (r.shout) j["shout"] = *r.shout;
  if (r.session) j["session"] = *r.session;
  if (r.conformance) j["conformance"] = *r.conformance;
  if (!r.pushed.empty()) j["pushed"] = r.pushed;
  if (r.validator) j["validator"] = *r.validator;
  if (r.note) j["note"] = *r.note;
  if (r.kind.is(MessageKind::Variant::Query)) j["items"] = json::array();
  return j;
}

// ---------------------------------------------------------------------------
// Store

Store::Store(std::unique_ptr<JournalBackend> journal, ServerSettings settings, Clock clock)
    : journal_(std::move(journal)), settings_(std::move(settings)), clock_(std::move(clock)) {
  session::SlotGrid{Timestamp{}, settings_.slot, settings_.tolerance}.validate();
  for (const auto& record : journal_->load()) apply(record);
}

Timestamp Store::arrival() { return std::max(clock_(), last_arrival_); }

std::string Store::next_shout_id() const { return "sh-" + std::to_string(shouts_.size() + 1); }

std::string Store::next_session_id() const { return "se-" + std::to_string(sessions_.size() + 1); }

JournalRecord Store::make_record(std::optional<Shout> shout, std::optional<Session> session,
                                 std::optional<ValidationReview> review, std::uint64_t offset) const {
  JournalRecord r;
  r.seq = seq_ + 1 + offset;
  r.written = clock_();
  r.shout = std::move(shout);
  r.session = std::move(session);
  r.review = std::move(review);
  return r;
}

void Store::commit(std::vector<JournalRecord> records) {
  journal_->append(records);
  for (const auto& r : records) apply(r);
}

void Store::apply(const JournalRecord& record) {
  seq_ = record.seq;
  if (record.shout) {
    const auto& s = *record.shout;
    shout_index_[s.id] = shouts_.size();
    shouts_.push_back(s);
    if (!s.kind.is(MessageKind::Variant::LostTimeslot) && s.source != Source::Mined) {
      last_arrival_ = std::max(last_arrival_, s.created);
    }
  }
  if (record.session) {
    const auto& s = *record.session;
    auto review = sessions_.contains(s.id) ? sessions_[s.id].review : std::nullopt;
    auto& slot = sessions_[s.id] = s;
    if (!slot.review) slot.review = std::move(review);
    if (s.open) {
      open_by_user_[s.user] = s.id;
    } else if (auto it = open_by_user_.find(s.user); it != open_by_user_.end() && it->second == s.id) {
      open_by_user_.erase(it);
    }
  }
  if (record.review) {
    const auto& r = *record.review;
    if (auto it = sessions_.find(r.session); it != sessions_.end()) it->second.review = r;
    reviewers_.insert(r.reviewer);
  }
}

Shout Store::shout_record(std::string nick, std::string message, Timestamp created) const {
  Shout s;
  s.nick = std::move(nick);
  s.message = std::move(message);
  s.created = created;
  parser::classify(s, settings_.parser);
  return s;
}

std::vector<Shout> Store::members_of(const Session& session) const {
  std::vector<Shout> out;
  for (const auto& id : session.shouts) {
    auto it = shout_index_.find(id);
    if (it == shout_index_.end()) continue;
    const auto& s = shouts_[it->second];
    if (s.kind.is(MessageKind::Variant::Shout)) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), by_created);
  return out;
}

const Session& Store::session_or_throw(const std::string& session_id) const {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session " + session_id);
  return it->second;
}

std::vector<User> Store::users() const {
  std::set<std::string> nicks(reviewers_);
  for (const auto& s : shouts_) nicks.insert(s.nick);
  std::vector<User> out;
  for (const auto& n : nicks) out.push_back(User{n, {n}, {}});
  return out;
}

Shout Store::receive_shout(std::string_view nick, std::string_view message, Source source,
                           std::optional<Timestamp> client_created) {
  auto who = normalize_nick(nick);
  require_message(message);
  std::unique_lock lock(mu_);
  auto s = shout_record(std::move(who), std::string(message), arrival());
  s.id = next_shout_id();
  s.source = source;
  s.client_created = client_created;
  std::optional<Session> touched;
  if (s.kind.is(MessageKind::Variant::Shout)) {
    if (auto it = open_by_user_.find(s.nick); it != open_by_user_.end()) {
      touched = sessions_.at(it->second);
      s.session_ref = touched->id;
      touched->shouts.push_back(s.id);
      touched->end = std::max(touched->end, s.created);
    }
  }
  commit({make_record(s, std::move(touched), std::nullopt)});
  return s;
}

MessageResult Store::receive_message(std::string_view nick, std::string_view message,
                                     std::vector<PushItem> batch) {
  auto who = normalize_nick(nick);
  require_message(message);
  MessageResult result;
  result.kind = parser::classify_kind(message);
  using V = MessageKind::Variant;

  if (result.kind.is(V::Shout)) {
    result.shout = receive_shout(who, message);
    return result;
  }

  std::unique_lock lock(mu_);
  const auto now = arrival();
  auto s = shout_record(who, std::string(message), now);
  s.id = next_shout_id();

  switch (result.kind.variant) {
    case V::Start: {
      Session session;
      if (auto it = open_by_user_.find(who); it != open_by_user_.end()) {
        session = sessions_.at(it->second);
        session.shouts.clear();
        session.lost_slots.clear();
        result.note = "NestedStart";
      } else {
        session.id = next_session_id();
        session.user = who;
        session.origin = SessionOrigin::Explicit;
        session.slot_duration = settings_.slot;
      }
      session.start = now;
      session.end = now;
      session.open = true;
      s.session_ref = session.id;
      commit({make_record(s, session, std::nullopt)});
      result.shout = s;
      result.session = session;
      break;
    }
    case V::Stop: {
      auto it = open_by_user_.find(who);
      if (it == open_by_user_.end()) throw Error(ErrorCode::NoOpenSession, "no open session for " + who);
      auto session = sessions_.at(it->second);
      session.end = std::max(session.end, now);
      session.open = false;
      s.session_ref = session.id;
      commit({make_record(s, session, std::nullopt)});
      result.shout = s;
      result.session = session;
      try {
        result.conformance = session::conformance(session, members_of(session), settings_.tolerance);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptySession) throw;
        result.note = std::string(to_string(ErrorCode::EmptySession));
      }
      const auto known = users();
      if (known.size() >= 2) {
        result.validator =
            session::assign_validator(session, known, static_cast<std::uint64_t>(to_unix(now))).id;
      }
      break;
    }
    case V::Push: {
      std::vector<JournalRecord> records;
      records.push_back(make_record(s, std::nullopt, std::nullopt));
      std::vector<Shout> pushed;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        require_message(batch[i].message);
        auto item = shout_record(who, batch[i].message, now);
        item.id = "sh-" + std::to_string(shouts_.size() + 2 + i);
        item.client_created = batch[i].client_created;
        records.push_back(make_record(item, std::nullopt, std::nullopt, i + 1));
        pushed.push_back(std::move(item));
      }
      commit(std::move(records));
      result.shout = s;
      result.pushed = std::move(pushed);
      break;
    }
    case V::Query: {
      commit({make_record(s, std::nullopt, std::nullopt)});
      result.shout = s;
      result.note = "NoTicketBackend";
      break;
    }
    case V::Shout:
    case V::LostTimeslot:
      break;
  }
  return result;
}

Session Store::attach_screencast(const std::string& session_id, std::string_view url) {
  std::unique_lock lock(mu_);
  auto session = session_or_throw(session_id);
  if (!valid_url(url)) throw Error(ErrorCode::BadUrl, "screencast url must be an absolute http(s) url");
  session.screencast = std::string(url);
  commit({make_record(std::nullopt, session, std::nullopt)});
  return session;
}

ValidationReview Store::record_review(const std::string& session_id, std::string_view reviewer, double score,
                                      std::optional<std::string> comment) {
  std::unique_lock lock(mu_);
  const auto& session = session_or_throw(session_id);
  auto review = session::record_review(session, reviewer, score, std::move(comment), arrival());
  commit({make_record(std::nullopt, std::nullopt, review)});
  return review;
}

Shout Store::emit_lost_timeslot(const std::string& session_id, std::int64_t slot) {
  std::unique_lock lock(mu_);
  auto session = session_or_throw(session_id);
  if (session.open) session.end = std::max(session.end, clock_());
  auto s = session::emit_lost_timeslot(session, members_of(session), slot, settings_.tolerance);
  s.id = next_shout_id();
  session.lost_slots.push_back(slot);
  commit({make_record(s, session, std::nullopt)});
  return s;
}

User Store::assign_validator(const std::string& session_id, std::uint64_t seed) const {
  std::shared_lock lock(mu_);
  return session::assign_validator(session_or_throw(session_id), users(), seed);
}

std::vector<Shout> Store::import_mined(std::vector<Shout> shouts) {
  std::unique_lock lock(mu_);
  std::vector<JournalRecord> records;
  for (std::size_t i = 0; i < shouts.size(); ++i) {
    auto& s = shouts[i];
    s.id = "sh-" + std::to_string(shouts_.size() + 1 + i);
    s.source = Source::Mined;
    s.session_ref.reset();
    records.push_back(make_record(s, std::nullopt, std::nullopt, i));
  }
  commit(std::move(records));
  return shouts;
}

std::vector<Shout> Store::list(const ShoutFilter& filter) const {
  std::shared_lock lock(mu_);
  std::vector<Shout> out;
  for (const auto& s : shouts_) {
    if (filter.matches(s)) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), by_created);
  return out;
}

std::string Store::render_listing(ListingFormat format, const ShoutFilter& filter) const {
  const auto shouts = list(filter);
  if (format == ListingFormat::Text) return render_text(shouts);
  return render_json(shouts).dump();
}

json Store::report(std::optional<std::size_t> latest) const {
  const auto n = latest.value_or(settings_.report_latest);
  auto shouts = list();
  std::reverse(shouts.begin(), shouts.end());
  if (shouts.size() > n) shouts.resize(n);

  std::shared_lock lock(mu_);
  json j;
  j["latest"] = render_json(shouts);
  j["open_sessions"] = json::array();
  std::vector<ValidationReview> reviews;
  for (const auto& [id, session] : sessions_) {
    if (session.open) j["open_sessions"].push_back(session);
    if (session.review) reviews.push_back(*session.review);
  }
  std::stable_sort(reviews.begin(), reviews.end(),
                   [](const ValidationReview& a, const ValidationReview& b) { return a.created > b.created; });
  if (reviews.size() > n) reviews.resize(n);
  j["latest_reviews"] = reviews;
  std::map<std::string, std::size_t> per_user;
  for (const auto& s : shouts_) ++per_user[s.nick];
  j["per_user"] = per_user;
  return j;
}

json Store::session_view(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  auto session = session_or_throw(session_id);
  json j;
  j["session"] = session;
  if (session.open) session.end = std::max(session.end, clock_());
  const auto members = members_of(session);
  if (members.empty()) {
    j["note"] = std::string(to_string(ErrorCode::EmptySession));
    j["lost_slots"] = session::lost_slots(session, members, settings_.tolerance);
  } else {
    j["conformance"] = session::conformance(session, members, settings_.tolerance);
  }
  return j;
}

std::optional<Session> Store::find_session(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Store::open_session_of(std::string_view nick) const {
  std::shared_lock lock(mu_);
  auto it = open_by_user_.find(normalize_nick(nick));
  if (it == open_by_user_.end()) return std::nullopt;
  return it->second;
}

StoreSnapshot Store::snapshot() const {
  std::shared_lock lock(mu_);
  StoreSnapshot snap;
  snap.shouts = shouts_;
  for (const auto& [id, s] : sessions_) snap.sessions.push_back(s);
  snap.users = users();
  return snap;
}

std::set<std::string> Store::corpus_texts() const {
  std::shared_lock lock(mu_);
  std::set<std::string> out;
  for (const auto& s : shouts_) out.insert(s.message);
  return out;
}

std::uint64_t Store::last_seq() const {
  std::shared_lock lock(mu_);
  return seq_;
}

}  // namespace aa::server

namespace aa::server {

StoreSnapshot snapshot_of_journal(const std::filesystem::path& path, ServerSettings settings) {
  Store store(std::make_unique<MemoryJournal>(read_journal_file(path)), std::move(settings));
  return store.snapshot();
}

}  // namespace aa::server
