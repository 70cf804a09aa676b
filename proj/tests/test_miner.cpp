#include <doctest.h>

#include <fstream>
#include <random>

#include "aa/miner.hpp"
#include "aa/store.hpp"
#include "oracles.hpp"
#include "workload.hpp"

using namespace aa;
using namespace aa::miner;

namespace {

Shout candidate(std::string nick, std::string text) {
  Shout s;
  s.nick = std::move(nick);
  s.message = std::move(text);
  s.created = from_unix(1367496000);
  s.source = Source::Mined;
  return s;
}

std::vector<std::string> texts_of(const std::vector<Shout>& shouts) {
  std::vector<std::string> out;
  for (const auto& s : shouts) out.push_back(s.message);
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ServerError;
}

std::filesystem::path write_file(const std::string& stem, const std::string& content) {
  auto path = workload::temp_path(stem);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("default chat pattern") {
  SourceSpec spec;
  auto parsed = parse_text(spec, "[2013-05-02 14:30:11] <bob> ;aa fixing timer\n");
  REQUIRE(parsed.candidates.size() == 1);
  const auto& c = parsed.candidates[0];
  CHECK(c.nick == "bob");
  CHECK(c.message == ";aa fixing timer");
  CHECK(c.created == *parse_iso8601("2013-05-02T14:30:11Z"));
  CHECK(c.source == Source::Mined);
  CHECK(parsed.scanned == 1);
  CHECK(parsed.skipped == 0);

  auto empty = parse_text(spec, "");
  CHECK(empty.candidates.empty());
  CHECK(empty.scanned == 0);

  spec.timezone = Seconds{-3 * 3600};
  CHECK(parse_text(spec, "[2013-05-02 14:30:11] <bob> hi").candidates[0].created ==
        *parse_iso8601("2013-05-02T17:30:11Z"));
}

TEST_CASE("synthetic log with malformed lines") {
  std::mt19937 rng(5);
  std::string log;
  std::size_t malformed = 0;
  std::vector<std::string> expected;
  for (int i = 0; i < 1000; ++i) {
    if (i % 100 == 37) {
      log += i % 200 == 37 ? "garbage line without structure\n" : "[2013-13-45 99:00:00] <bob> bad date\n";
      ++malformed;
      continue;
    }
    const auto text = "message number " + std::to_string(i);
    log += "[2013-05-02 " + std::string(i % 24 < 10 ? "0" : "") + std::to_string(i % 24) + ":00:00] <u" +
           std::to_string(rng() % 7) + "> " + text + "\n";
    expected.push_back(text);
  }
  const auto path = write_file("chat.log", log);
  SourceSpec spec;
  spec.path = path;
  auto parsed = parse_source(spec);
  CHECK(malformed == 10);
  CHECK(parsed.scanned == 1000);
  CHECK(parsed.skipped == 10);
  CHECK(parsed.candidates.size() == 990);
  CHECK(texts_of(parsed.candidates) == expected);

  spec.path = workload::temp_path("missing.log");
  CHECK(code_of([&] { parse_source(spec); }) == ErrorCode::UnreadableSource);
}

TEST_CASE("source spec validation") {
  SourceSpec spec;
  spec.pattern = R"(^(?<nick>\S+) (?<text>.*)$)";
  CHECK(code_of([&] { spec.validate(); }) == ErrorCode::BadPattern);
  spec.pattern = "([unclosed";
  CHECK(code_of([&] { spec.validate(); }) == ErrorCode::BadPattern);
  spec.pattern = R"(^(?<timestamp>\S+ \S+) (?<nick>\S+): (?<text>.*)$)";
  spec.validate();
  auto custom = parse_text(spec, "2013-05-02 10:00:00 ana: custom format");
  REQUIRE(custom.candidates.size() == 1);
  CHECK(custom.candidates[0].nick == "ana");

  SourceSpec dump;
  dump.kind = SourceKind::JsonDump;
  dump.mapping.erase("created");
  CHECK(code_of([&] { dump.validate(); }) == ErrorCode::BadMapping);
}

TEST_CASE("json, jsonl and tabular dumps") {
  SourceSpec spec;
  spec.kind = SourceKind::JsonDump;
  spec.mapping = {{"nick", "user.nick"}, {"message", "text"}, {"created", "ts"}};
  auto array = parse_text(spec, R"([
    {"user": {"nick": "Bob"}, "text": "one", "ts": "2013-05-02T10:00:00Z"},
    {"user": {"nick": "ana"}, "text": "two", "ts": {"$date": 1367488800000}},
    {"user": {"nick": "cy"}, "text": "three", "ts": {"$date": {"$numberLong": "1367488800000"}}},
    {"user": {"nick": "dee"}, "text": "four", "ts": 1367488800},
    {"user": {"nick": "eve"}, "ts": 1367488800},
    {"text": "no user", "ts": 1367488800}
  ])");
  CHECK(array.scanned == 6);
  CHECK(array.skipped == 2);
  REQUIRE(array.candidates.size() == 4);
  CHECK(array.candidates[0].nick == "bob");
  for (const auto& c : array.candidates) CHECK(c.created == from_unix(1367488800));

  auto lines = parse_text(spec, "{\"user\":{\"nick\":\"a\"},\"text\":\"x\",\"ts\":1}\nnot json\n\n"
                                "{\"user\":{\"nick\":\"b\"},\"text\":\"y\",\"ts\":2}\n");
  CHECK(lines.candidates.size() == 2);
  CHECK(lines.skipped == 1);

  SourceSpec csv;
  csv.kind = SourceKind::TabularDump;
  csv.mapping = {{"nick", "author"}, {"message", "body"}, {"created", "when"}};
  auto rows = parse_text(csv, "author,when,body\nbob,2013-05-02 10:00:00,\"hello, \"\"world\"\"\"\nana,1367488800,plain\n"
                              "cy,not a date,x\n");
  CHECK(rows.scanned == 3);
  CHECK(rows.skipped == 1);
  REQUIRE(rows.candidates.size() == 2);
  CHECK(rows.candidates[0].message == "hello, \"world\"");
  CHECK(rows.candidates[1].created == from_unix(1367488800));

  csv.delimiter = '\t';
  CHECK(parse_text(csv, "author\twhen\tbody\nbob\t2013-05-02 10:00:00\ttabbed\n").candidates.size() == 1);
  CHECK(code_of([&] { parse_text(csv, "x\ty\nz\tw\n"); }) == ErrorCode::BadMapping);

  CHECK(parse_delimited("a,\"b\nc\",d\r\ne,f\n", ',') ==
        std::vector<std::vector<std::string>>{{"a", "b\nc", "d"}, {"e", "f"}});
}

TEST_CASE("selection modes") {
  std::vector<Shout> cands{candidate("bob", ";aa reading"), candidate("bob", "shipping release #aao0"),
                           candidate("bob", "no tags"), candidate("bob", ";aa "), candidate("bob", "+aao0 plus tag")};
  auto prefix = select_shouts(cands, SelectMode::Prefix);
  REQUIRE(prefix.size() == 1);
  CHECK(prefix[0].message == "reading");

  auto tags = select_shouts(cands, SelectMode::Tags);
  CHECK(texts_of(tags) == std::vector<std::string>{"shipping release #aao0", "+aao0 plus tag"});
  CHECK(select_shouts(cands, SelectMode::Tags, {"other"}).empty());

  auto all = select_shouts(cands, SelectMode::All);
  CHECK(all.size() == cands.size());
  CHECK(all[0].kind.is(MessageKind::Variant::Shout));

  CHECK(select_mode_from_string("tags") == SelectMode::Tags);
  CHECK_FALSE(select_mode_from_string("some"));
}

TEST_CASE("dedup examples") {
  std::vector<Shout> cands;
  for (const auto* t : {"a", "b", "c", "d", "e", "f", "g", "a", "b", "h"}) cands.push_back(candidate("bob", t));
  const std::set<std::string> corpus{"c", "d", "e"};
  auto result = dedup(cands, corpus);
  CHECK(texts_of(result.kept) == std::vector<std::string>{"a", "b", "f", "g", "h"});
  CHECK(result.discarded.size() == 5);
  CHECK(result.report.candidates == 10);
  CHECK(result.report.kept == 5);
  CHECK(result.report.duplicates_discarded == 5);

  CHECK(dedup(cands, {}).kept.size() == 8);
  CHECK(dedup({candidate("a", "same"), candidate("b", "same ")}, {}).kept.size() == 1);

  // Text keying conflates different users; nick-text keying keeps them apart.
  std::vector<Shout> two_users{candidate("ana", "lunch"), candidate("bob", "lunch")};
  CHECK(dedup(two_users, {"lunch"}).kept.empty());
  CHECK(dedup(two_users, {}, DedupKey::Text).kept.size() == 1);
  auto by_user = dedup(two_users, {"ana\tlunch"}, DedupKey::NickText);
  REQUIRE(by_user.kept.size() == 1);
  CHECK(by_user.kept[0].nick == "bob");
}

TEST_CASE("dedup equals the nested-loop oracle") {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> pool{"a", "b", "c", "a ", "a\t", " a", "dd", "e e", "ção", ""};
  for (int round = 0; round < 300; ++round) {
    const auto n = rng() % 200;
    const auto m = rng() % 200;
    std::vector<Shout> cands;
    std::vector<std::string> cand_texts;
    for (std::size_t i = 0; i < n; ++i) {
      auto text = pool[rng() % pool.size()] + (rng() % 3 ? std::to_string(rng() % 20) : std::string());
      cands.push_back(candidate("u" + std::to_string(rng() % 3), text));
      cand_texts.push_back(text);
    }
    std::vector<std::string> corpus_list;
    std::set<std::string> corpus;
    for (std::size_t i = 0; i < m; ++i) {
      auto text = pool[rng() % pool.size()] + std::to_string(rng() % 20);
      corpus_list.push_back(text);
      corpus.insert(oracle::rtrim(text));
    }
    const auto result = dedup(cands, corpus);
    const auto expected = oracle::dedup_kept(cand_texts, corpus_list);
    REQUIRE(result.kept.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(result.kept[k].message == cand_texts[expected[k]]);

    // Conservation: kept and discarded partition the candidates as multisets.
    auto merged = texts_of(result.kept);
    for (const auto& d : result.discarded) merged.push_back(d.message);
    auto original = cand_texts;
    std::sort(merged.begin(), merged.end());
    std::sort(original.begin(), original.end());
    CHECK(merged == original);
    CHECK(result.report.kept == result.report.candidates - result.report.duplicates_discarded);

    // A corpus containing every candidate text keeps nothing.
    std::set<std::string> superset(corpus);
    for (const auto& t : cand_texts) superset.insert(t);
    CHECK(dedup(cands, superset).kept.empty());
  }
}

TEST_CASE("spec files and the import pipeline") {
  const auto dir = workload::temp_path("mine").parent_path();
  std::ofstream(dir / "irc.log") << "[2013-05-02 14:30:11] <bob> ;aa fixing timer\n"
                                    "[2013-05-02 14:31:00] <ana> not a shout\n"
                                    "[2013-05-02 14:45:00] <ana> ;aa reviewing #aao0\n"
                                    "broken\n";
  std::ofstream(dir / "dump.tsv") << "who\twhen\tmsg\nana\t2013-05-02 09:00:00\t;aa morning\n";
  std::ofstream(dir / "sources.conf") << "[source]\nkind = irc\npath = irc.log\nname = irc\n"
                                         "[source]\nkind = tsv\npath = dump.tsv\ntimezone = -03:00\n"
                                         "map.nick = who\nmap.created = when\nmap.message = msg\n";
  const auto specs = load_specs(dir / "sources.conf");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].label() == "irc");
  CHECK(specs[1].delimiter == '\t');
  CHECK(specs[1].timezone == Seconds{-3 * 3600});
  CHECK(specs[1].path == dir / "dump.tsv");

  const auto journal = dir / "journal.jsonl";
  server::Store store(std::make_unique<server::FileJournal>(journal));
  store.receive_shout("ana", "morning");

  const auto corpus = corpus_of(store.list(), DedupKey::Text);
  auto dry = mine(specs, MineOptions{.dry_run = true}, corpus, nullptr);
  CHECK(dry.imported.empty());
  CHECK(dry.report.scanned == 5);
  CHECK(dry.report.skipped == 1);
  CHECK(dry.report.candidates == 3);
  CHECK(dry.report.duplicates_discarded == 1);
  CHECK(dry.report.kept == 2);
  CHECK(dry.report.per_source.at("irc").kept == 2);
  CHECK(store.list().size() == 1);

  auto first = mine(specs, MineOptions{}, corpus, &store);
  CHECK(first.imported.size() == 2);
  CHECK(store.list().size() == 3);
  for (const auto& s : first.imported) CHECK(s.source == Source::Mined);
  CHECK(store.list()[0].message == "fixing timer");
  CHECK(store.list()[0].created == *parse_iso8601("2013-05-02T14:30:11Z"));

  // Idempotence: re-mining against the refreshed corpus keeps nothing.
  auto again = mine(specs, MineOptions{}, corpus_of(store.list(), DedupKey::Text), &store);
  CHECK(again.report.kept == 0);
  CHECK(again.imported.empty());
  CHECK(server::read_journal_file(journal).size() == 3);

  auto nothing = mine({}, MineOptions{}, {}, &store);
  CHECK(nothing.report.scanned == 0);
  CHECK(store.last_seq() == 3);
}
