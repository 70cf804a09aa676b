#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aa/model.hpp"

namespace aa::server {

// One line of the append-only journal. A record carries whatever the request
// produced: a shout, the post-change snapshot of the session it touched, or a
// review. Records are never rewritten; later records supersede earlier state.
struct JournalRecord {
  std::uint64_t seq = 0;
  Timestamp written{};
  std::optional<Shout> shout;
  std::optional<Session> session;
  std::optional<ValidationReview> review;

  friend bool operator==(const JournalRecord&, const JournalRecord&) = default;
};

std::string encode_record(const JournalRecord& record);
JournalRecord decode_record(std::string_view line);

class JournalBackend {
 public:
  virtual ~JournalBackend() = default;

  virtual std::vector<JournalRecord> load() = 0;

  // All-or-nothing. Throws Error(JournalFailure) and leaves no partial write.
  virtual void append(std::span<const JournalRecord> records) = 0;
};

class FileJournal final : public JournalBackend {
 public:
  explicit FileJournal(std::filesystem::path path);

  std::vector<JournalRecord> load() override;
  void append(std::span<const JournalRecord> records) override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// In-memory backend with fault injection, for tests and dry runs.
class MemoryJournal final : public JournalBackend {
 public:
  MemoryJournal() = default;
  explicit MemoryJournal(std::vector<JournalRecord> records) : records_(std::move(records)) {}

  std::vector<JournalRecord> load() override { return records_; }
  void append(std::span<const JournalRecord> records) override;

  // The next `n` successful appends go through, then every append fails.
  void fail_after(std::size_t n) { fail_after_ = n; }
  void heal() { fail_after_.reset(); }

  const std::vector<JournalRecord>& records() const { return records_; }

 private:
  std::vector<JournalRecord> records_;
  std::optional<std::size_t> fail_after_;
};

std::vector<JournalRecord> read_journal_file(const std::filesystem::path& path);

}  // namespace aa::server
