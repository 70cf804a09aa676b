#include "aa/journal.hpp"

#include <fstream>
#include <sstream>

#include "aa/json_io.hpp"
#include "aa/text.hpp"

namespace aa::server {

using nlohmann::json;

std::string encode_record(const JournalRecord& record) {
  json j;
  j["seq"] = record.seq;
  j["written"] = format_iso8601(record.written);
  if (record.shout) {
    j["type"] = "shout";
  } else if (record.review) {
    j["type"] = "review";
  } else {
    j["type"] = "session";
  }
  if (record.shout) j["shout"] = *record.shout;
  if (record.session) j["session"] = *record.session;
  if (record.review) j["review"] = *record.review;
  return j.dump();
}

JournalRecord decode_record(std::string_view line) {
  JournalRecord record;
  try {
    const auto j = json::parse(line);
    record.seq = j.at("seq").get<std::uint64_t>();
    auto written = parse_iso8601(j.at("written").get<std::string>());
    if (!written) throw Error(ErrorCode::JournalFailure, "bad written timestamp");
    record.written = *written;
    if (j.contains("shout")) record.shout = j.at("shout").get<Shout>();
    if (j.contains("session")) record.session = j.at("session").get<Session>();
    if (j.contains("review")) record.review = j.at("review").get<ValidationReview>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::JournalFailure, std::string("malformed journal record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::JournalFailure, std::string("malformed journal record: ") + e.what());
  }
  return record;
}

FileJournal::FileJournal(std::filesystem::path path) : path_(std::move(path)) {}

std::vector<JournalRecord> FileJournal::load() { return read_journal_file(path_); }

void FileJournal::append(std::span<const JournalRecord> records) {
  if (records.empty()) return;
  std::string buffer;
  for (const auto& r : records) {
    buffer += encode_record(r);
    buffer += '\n';
  }

  std::error_code ec;
  const auto before = std::filesystem::exists(path_, ec) ? std::filesystem::file_size(path_, ec) : 0;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::JournalFailure, "cannot open journal " + path_.string());
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out.flush();
  if (!out) {
    out.close();
    std::filesystem::resize_file(path_, before, ec);
    throw Error(ErrorCode::JournalFailure, "write to journal " + path_.string() + " failed");
  }
}

void MemoryJournal::append(std::span<const JournalRecord> records) {
  if (fail_after_) {
    if (*fail_after_ == 0) throw Error(ErrorCode::JournalFailure, "injected journal failure");
    --*fail_after_;
  }
  records_.insert(records_.end(), records.begin(), records.end());
}

std::vector<JournalRecord> read_journal_file(const std::filesystem::path& path) {
  std::vector<JournalRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::JournalFailure, "cannot read journal " + path.string());
  std::string line;
  std::uint64_t last_seq = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto record = decode_record(line);
    if (record.seq != last_seq + 1) {
      throw Error(ErrorCode::JournalFailure, "journal sequence broken at seq " + std::to_string(record.seq));
    }
    last_seq = record.seq;
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace aa::server
