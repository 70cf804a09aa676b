#include "aa/session.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

namespace aa::session {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  auto q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

SlotGrid grid_for(const Session& session, Seconds tolerance) {
  SlotGrid grid{session.start, session.slot_duration, tolerance};
  grid.validate();
  return grid;
}

bool carries_word_tag(const Shout& s) {
  return std::any_of(s.tags.begin(), s.tags.end(), [](const Tag& t) { return t.form == TagForm::Word; });
}

void add_tag(Shout& shout, const Tag& tag) {
  if (std::find(shout.tags.begin(), shout.tags.end(), tag) == shout.tags.end()) shout.tags.push_back(tag);
}

}  // namespace

void SlotGrid::validate() const {
  if (slot <= Seconds{0}) throw Error(ErrorCode::InvalidGrid, "slot must be positive");
  if (tolerance < Seconds{0} || tolerance * 2 >= slot) {
    throw Error(ErrorCode::InvalidGrid, "tolerance must satisfy 0 <= tolerance < slot/2");
  }
}

SlotAssignment assign_slot(const SlotGrid& grid, Timestamp t) {
  grid.validate();
  const auto delta = (t - grid.anchor).count();
  if (delta < -grid.tolerance.count()) {
    throw Error(ErrorCode::BeforeAnchor, "timestamp precedes the grid anchor");
  }
  const auto slot = grid.slot.count();
  // Round half up: floor((delta + slot/2) / slot) with exact halves going to the later slot.
  const auto index = std::max<std::int64_t>(0, floor_div(2 * delta + slot, 2 * slot));
  SlotAssignment out;
  out.index = index;
  out.offset = Seconds{delta - index * slot};
  out.within_tolerance = std::abs(out.offset.count()) <= grid.tolerance.count();
  return out;
}

std::vector<Shout> slot_members(const Session& session, std::span<const Shout> shouts) {
  std::unordered_set<std::string> ids(session.shouts.begin(), session.shouts.end());
  std::vector<Shout> out;
  for (const auto& s : shouts) {
    if (s.kind.is(MessageKind::Variant::Shout) && ids.contains(s.id)) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Shout& a, const Shout& b) { return a.created < b.created; });
  return out;
}

std::vector<std::int64_t> lost_slots(const Session& session, std::span<const Shout> members,
                                     Seconds tolerance) {
  const auto grid = grid_for(session, tolerance);
  std::set<std::int64_t> assigned;
  for (const auto& s : members) {
    if (!s.kind.is(MessageKind::Variant::Shout)) continue;
    assigned.insert(assign_slot(grid, s.created).index);
  }
  const auto span = std::max<std::int64_t>(0, (session.end - session.start).count());
  const auto last = span / session.slot_duration.count();
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i <= last; ++i) {
    if (!assigned.contains(i)) out.push_back(i);
  }
  return out;
}

ConformanceReport conformance(const Session& session, std::span<const Shout> members, Seconds tolerance) {
  const auto grid = grid_for(session, tolerance);
  ConformanceReport report;
  for (const auto& s : members) {
    if (!s.kind.is(MessageKind::Variant::Shout)) continue;
    const auto a = assign_slot(grid, s.created);
    report.per_shout.push_back({s.id, a.index, a.offset, a.within_tolerance});
  }
  if (report.per_shout.empty()) throw Error(ErrorCode::EmptySession, "session has no shouts");
  report.lost_slots = lost_slots(session, members, tolerance);
  const bool all_on_time = std::all_of(report.per_shout.begin(), report.per_shout.end(),
                                       [](const ShoutConformance& c) { return c.within_tolerance; });
  report.ideal = report.lost_slots.empty() && all_on_time &&
                 report.per_shout.size() == kIdealShoutCount &&
                 (session.end - session.start) <= kIdealMaxSpan;
  return report;
}

Shout emit_lost_timeslot(const Session& session, std::span<const Shout> members, std::int64_t slot_index,
                         Seconds tolerance) {
  if (std::find(session.lost_slots.begin(), session.lost_slots.end(), slot_index) !=
      session.lost_slots.end()) {
    throw Error(ErrorCode::DuplicateLostSlot, "slot " + std::to_string(slot_index) + " already recorded");
  }
  const auto lost = lost_slots(session, members, tolerance);
  if (std::find(lost.begin(), lost.end(), slot_index) == lost.end()) {
    throw Error(ErrorCode::NotLost, "slot " + std::to_string(slot_index) + " is not lost");
  }
  Shout shout;
  shout.nick = session.user;
  shout.message = "lost timeslot " + std::to_string(slot_index);
  shout.created = session.start + slot_index * session.slot_duration;
  shout.kind = MessageKind::lost_timeslot();
  shout.session_ref = session.id;
  return shout;
}

std::vector<Session> infer_sessions(std::span<const Shout> shouts, Seconds gap_threshold, Seconds slot) {
  std::vector<Session> out;
  if (shouts.empty()) return out;
  const auto& user = shouts.front().nick;
  for (std::size_t i = 0; i < shouts.size(); ++i) {
    if (shouts[i].nick != user) throw Error(ErrorCode::MixedUsers, "shouts from more than one user");
    if (i > 0 && shouts[i].created < shouts[i - 1].created) {
      throw Error(ErrorCode::UnsortedInput, "shouts must be sorted by created");
    }
  }
  for (std::size_t i = 0; i < shouts.size(); ++i) {
    const auto& s = shouts[i];
    if (i == 0 || s.created - shouts[i - 1].created > gap_threshold) {
      Session session;
      session.id = "inferred-" + user + "-" + s.id;
      session.user = user;
      session.origin = SessionOrigin::Inferred;
      session.start = s.created;
      session.slot_duration = slot;
      out.push_back(std::move(session));
    }
    out.back().shouts.push_back(s.id);
    out.back().end = s.created;
  }
  return out;
}

User assign_validator(const Session& session, std::span<const User> users, std::uint64_t seed) {
  std::vector<const User*> eligible;
  for (const auto& u : users) {
    if (u.id != session.user) eligible.push_back(&u);
  }
  if (eligible.empty()) throw Error(ErrorCode::NoEligibleValidator, "no user other than the owner");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  return *eligible[pick(rng)];
}

ValidationReview record_review(const Session& session, std::string_view reviewer, double score,
                               std::optional<std::string> comment, Timestamp created) {
  auto who = normalize_nick(reviewer);
  if (who == session.user) throw Error(ErrorCode::SelfReview, "owner cannot review own session");
  if (!(score >= 0.0 && score <= 1.0)) throw Error(ErrorCode::ScoreOutOfRange, "score must lie in [0, 1]");
  return {session.id, std::move(who), score, std::move(comment), created};
}

std::vector<Shout> apply_session_tags(std::vector<Shout> members, std::span<const TagPlacement> tags) {
  // Boundaries come from the members' own tags, not from propagated ones.
  std::vector<bool> own_word_tag;
  own_word_tag.reserve(members.size());
  for (const auto& m : members) own_word_tag.push_back(carries_word_tag(m));
  for (const auto& placement : tags) {
    const auto& tag = placement.tag;
    if (tag.scope == TagScope::Session) {
      for (auto& m : members) add_tag(m, tag);
    } else if (tag.scope == TagScope::UntilNextTag) {
      if (placement.origin >= members.size()) continue;
      add_tag(members[placement.origin], tag);
      for (std::size_t i = placement.origin + 1; i < members.size(); ++i) {
        if (own_word_tag[i]) break;
        add_tag(members[i], tag);
      }
    }
  }
  return members;
}

std::vector<TagPlacement> word_tag_placements(std::span<const Shout> members) {
  std::vector<TagPlacement> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const auto& t : members[i].tags) {
      if (t.form == TagForm::Word && t.scope == TagScope::UntilNextTag) out.push_back({t, i});
    }
  }
  return out;
}

}  // namespace aa::session
