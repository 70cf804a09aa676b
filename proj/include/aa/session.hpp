#pragma once

// Slot grid, conformance to the ideal session, lost timeslots, session
// inference, peer-validator assignment and session-level tagging.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aa/model.hpp"

namespace aa::session {

// An ideal session holds this many shouts within this span.
inline constexpr std::size_t kIdealShoutCount = 8;
inline constexpr Seconds kIdealMaxSpan{2 * 60 * 60};

struct SlotGrid {
  Timestamp anchor{};
  Seconds slot = kDefaultSlot;
  Seconds tolerance = kDefaultTolerance;

  // Throws InvalidGrid unless slot > 0 and 0 <= tolerance < slot/2.
  void validate() const;
};

struct SlotAssignment {
  std::int64_t index = 0;
  Seconds offset{0};
  bool within_tolerance = false;

  friend bool operator==(const SlotAssignment&, const SlotAssignment&) = default;
};

// Nearest-multiple rounding so the tolerance window is symmetric around each
// grid mark. Throws BeforeAnchor when t < anchor - tolerance.
SlotAssignment assign_slot(const SlotGrid& grid, Timestamp t);

struct ShoutConformance {
  std::string shout_id;
  std::int64_t slot = 0;
  Seconds offset{0};
  bool within_tolerance = false;
};

struct ConformanceReport {
  std::vector<ShoutConformance> per_shout;
  std::vector<std::int64_t> lost_slots;
  bool ideal = false;
};

// Members that take part in slot accounting: kind Shout, listed in the session.
std::vector<Shout> slot_members(const Session& session, std::span<const Shout> shouts);

// Grid indices in [0, floor((end - start) / slot)] with no member assigned.
// Works for sessions without members.
std::vector<std::int64_t> lost_slots(const Session& session, std::span<const Shout> members,
                                     Seconds tolerance = kDefaultTolerance);

// Throws EmptySession when `members` holds no Shout-kind record.
ConformanceReport conformance(const Session& session, std::span<const Shout> members,
                              Seconds tolerance = kDefaultTolerance);

// Machine-generated LostTimeslot record at anchor + slot_index * slot. The
// caller assigns the id. Throws NotLost or DuplicateLostSlot.
Shout emit_lost_timeslot(const Session& session, std::span<const Shout> members,
                         std::int64_t slot_index, Seconds tolerance = kDefaultTolerance);

// Greedy single pass: a new session starts whenever the gap to the previous
// shout exceeds gap_threshold. Throws MixedUsers / UnsortedInput.
std::vector<Session> infer_sessions(std::span<const Shout> shouts, Seconds gap_threshold = kDefaultGap,
                                    Seconds slot = kDefaultSlot);

// Uniform over users other than the owner, seeded. Throws NoEligibleValidator.
User assign_validator(const Session& session, std::span<const User> users, std::uint64_t seed);

// Throws SelfReview, ScoreOutOfRange.
ValidationReview record_review(const Session& session, std::string_view reviewer, double score,
                               std::optional<std::string> comment, Timestamp created);

struct TagPlacement {
  Tag tag;
  std::size_t origin = 0;  // index of the emitting member; unused for Session scope
};

// Session-scoped tags go on every member; UntilNextTag tags run from their
// origin up to (excluding) the next member that carries its own Word tag.
std::vector<Shout> apply_session_tags(std::vector<Shout> members, std::span<const TagPlacement> tags);

// Placements for the UntilNextTag word tags the members already carry.
std::vector<TagPlacement> word_tag_placements(std::span<const Shout> members);

}  // namespace aa::session
