#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "aa/http_server.hpp"
#include "aa/json_io.hpp"
#include "aa/store.hpp"
#include "workload.hpp"

using namespace aa;
using namespace aa::server;
using nlohmann::json;
using V = MessageKind::Variant;

namespace {

struct Fixture {
  workload::StepClock clock;
  MemoryJournal* journal = nullptr;
  std::unique_ptr<Store> store;

  explicit Fixture(ServerSettings settings = {}) {
    auto backend = std::make_unique<MemoryJournal>();
    journal = backend.get();
    store = std::make_unique<Store>(std::move(backend), settings, [this] { return clock(); });
  }
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ServerError;
}

}  // namespace

TEST_CASE("receive_shout stamps arrival time and parses") {
  Fixture f;
  auto s = f.store->receive_shout("Bob", "slot grid done #coding");
  CHECK(s.nick == "bob");
  CHECK(s.kind.is(V::Shout));
  CHECK(s.tags == std::vector<Tag>{Tag::hash("coding")});
  CHECK(s.created == f.clock());
  CHECK(s.source == Source::Http);
  CHECK(f.journal->records().size() == 1);

  CHECK(code_of([&] { f.store->receive_shout("", "x"); }) == ErrorCode::EmptyNick);
  CHECK(code_of([&] { f.store->receive_shout("bob", "  "); }) == ErrorCode::EmptyMessage);

  auto again = f.store->receive_shout("bob", "slot grid done #coding");
  CHECK(again.id != s.id);
  CHECK(f.store->list().size() == 2);
}

TEST_CASE("listings in text and json") {
  Fixture f;
  CHECK(f.store->render_listing(ListingFormat::Json) == "[]");
  CHECK(f.store->render_listing(ListingFormat::Text).empty());
  f.store->receive_shout("bob", "one");
  f.clock.now += 60;
  f.store->receive_shout("ana", "two\tthree");
  f.clock.now += 60;
  f.store->receive_shout("bob", "four");
  const auto text = f.store->render_listing(ListingFormat::Text);
  CHECK(text ==
        "2013-05-02T12:00:00Z\tbob\tone\n"
        "2013-05-02T12:01:00Z\tana\ttwo three\n"
        "2013-05-02T12:02:00Z\tbob\tfour\n");
  auto bob = f.store->list(ShoutFilter::parse("bob", std::nullopt, std::nullopt));
  CHECK(bob.size() == 2);
  auto window = f.store->list(ShoutFilter::parse(std::nullopt, "2013-05-02T12:00:30Z", "2013-05-02T12:01:30Z"));
  REQUIRE(window.size() == 1);
  CHECK(window[0].nick == "ana");
  CHECK(code_of([] { ShoutFilter::parse(std::nullopt, "noon", std::nullopt); }) == ErrorCode::BadFilter);
  CHECK(code_of([] { ShoutFilter::parse(std::nullopt, "2013-05-03", "2013-05-02"); }) == ErrorCode::BadFilter);
}

TEST_CASE("start, shouts and stop build an explicit session") {
  ServerSettings settings;
  Fixture f(settings);
  auto started = f.store->receive_message("bob", "start");
  REQUIRE(started.session);
  CHECK(started.session->open);
  const auto id = started.session->id;
  for (int i = 0; i < 8; ++i) {
    f.store->receive_shout("bob", "step " + std::to_string(i));
    if (i < 7) f.clock.now += 15 * 60;
  }
  auto stopped = f.store->receive_message("bob", "stop");
  REQUIRE(stopped.conformance);
  CHECK(stopped.conformance->ideal);
  CHECK_FALSE(stopped.session->open);
  CHECK(stopped.session->shouts.size() == 8);
  CHECK_FALSE(stopped.validator);  // bob is the only user

  CHECK(code_of([&] { f.store->receive_message("bob", "stop"); }) == ErrorCode::NoOpenSession);

  // Membership invariant.
  const auto snap = f.store->snapshot();
  for (const auto& se : snap.sessions) {
    for (const auto& sid : se.shouts) {
      auto it = std::find_if(snap.shouts.begin(), snap.shouts.end(), [&](const Shout& s) { return s.id == sid; });
      REQUIRE(it != snap.shouts.end());
      CHECK(it->nick == se.user);
      CHECK(it->created >= se.start);
      CHECK(it->created <= se.end);
    }
  }
  (void)id;
}

TEST_CASE("stop right after start is EmptySession-safe; nested start replaces anchor") {
  Fixture f;
  f.store->receive_shout("ana", "hello there friends");
  auto s1 = f.store->receive_message("bob", "start");
  f.clock.now += 100;
  f.store->receive_shout("bob", "first");
  f.clock.now += 100;
  auto s2 = f.store->receive_message("bob", "start again");
  CHECK(s2.note == "NestedStart");
  CHECK(s2.session->id == s1.session->id);
  CHECK(s2.session->start == f.clock());
  CHECK(s2.session->shouts.empty());
  auto stop = f.store->receive_message("bob", "stop");
  CHECK(stop.note == "EmptySession");
  CHECK_FALSE(stop.conformance);
  CHECK(stop.validator == "ana");
}

TEST_CASE("push carries a batch in one append") {
  Fixture f;
  auto r = f.store->receive_message("bob", "push", {{"offline one", from_unix(1000)}, {"offline two", std::nullopt}});
  CHECK(r.pushed.size() == 2);
  CHECK(r.pushed[0].client_created == from_unix(1000));
  CHECK(f.journal->records().size() == 3);
  auto q = f.store->receive_message("bob", "tickets");
  CHECK(q.note == "NoTicketBackend");
  CHECK(to_json(q).at("items") == json::array());
}

TEST_CASE("screencast, review and lost slots") {
  Fixture f;
  f.store->receive_shout("ana", "around");
  const auto id = f.store->receive_message("bob", "start").session->id;
  f.clock.now += 50 * 60;
  auto lost = f.store->emit_lost_timeslot(id, 1);
  CHECK(lost.kind.is(V::LostTimeslot));
  CHECK(lost.created == from_unix(1367496000 + 15 * 60));
  CHECK(code_of([&] { f.store->emit_lost_timeslot(id, 1); }) == ErrorCode::DuplicateLostSlot);
  f.store->receive_message("bob", "stop");

  CHECK(code_of([&] { f.store->attach_screencast("se-404", "https://v.example/a"); }) == ErrorCode::UnknownSession);
  CHECK(code_of([&] { f.store->attach_screencast(id, "ftp://nope"); }) == ErrorCode::BadUrl);
  f.store->attach_screencast(id, "https://v.example/a");
  f.store->attach_screencast(id, "https://v.example/b");
  CHECK(f.store->find_session(id)->screencast == "https://v.example/b");
  std::size_t screencast_records = 0;
  for (const auto& rec : f.journal->records()) screencast_records += rec.session && rec.session->screencast && !rec.shout;
  CHECK(screencast_records == 2);

  CHECK(code_of([&] { f.store->record_review(id, "bob", 0.5, std::nullopt); }) == ErrorCode::SelfReview);
  CHECK(code_of([&] { f.store->record_review(id, "ana", 1.5, std::nullopt); }) == ErrorCode::ScoreOutOfRange);
  CHECK(code_of([&] { f.store->record_review("se-404", "ana", 0.5, std::nullopt); }) == ErrorCode::UnknownSession);
  f.store->record_review(id, "ana", 0.4, std::nullopt);
  f.store->record_review(id, "ana", 0.9, "replaced");
  CHECK(f.store->find_session(id)->review->score == doctest::Approx(0.9));
  CHECK(f.store->assign_validator(id, 3).id == "ana");
}

TEST_CASE("report") {
  Fixture f;
  auto empty = f.store->report();
  CHECK(empty["latest"].empty());
  CHECK(empty["open_sessions"].empty());
  CHECK(empty["latest_reviews"].empty());
  for (int i = 0; i < 5; ++i) {
    f.store->receive_shout(i % 2 ? "ana" : "bob", "shout " + std::to_string(i));
    f.clock.now += 10;
  }
  CHECK(f.store->report()["latest"].size() == 5);
  auto two = f.store->report(2);
  REQUIRE(two["latest"].size() == 2);
  // Sort oracle: the two largest created values, newest first.
  CHECK(two["latest"][0]["message"] == "shout 4");
  CHECK(two["latest"][1]["message"] == "shout 3");
  CHECK(two["per_user"]["bob"] == 3);
}

TEST_CASE("journal failure leaves no partial state") {
  Fixture f;
  f.store->receive_shout("bob", "kept");
  f.journal->fail_after(0);
  CHECK(code_of([&] { f.store->receive_shout("bob", "lost"); }) == ErrorCode::JournalFailure);
  CHECK(code_of([&] {
          f.store->receive_message("bob", "push", {{"a", std::nullopt}, {"b", std::nullopt}});
        }) == ErrorCode::JournalFailure);
  CHECK(f.store->list().size() == 1);
  CHECK(f.journal->records().size() == 1);
  f.journal->heal();
  f.store->receive_shout("bob", "after");
  CHECK(f.store->list().size() == 2);
  CHECK(f.store->last_seq() == 2);
}

TEST_CASE("file journal: replay, seq continuity and rollback") {
  const auto path = workload::temp_path("journal.jsonl");
  workload::StepClock clock;
  {
    Store store(std::make_unique<FileJournal>(path), {}, [&] { return clock(); });
    store.receive_shout("bob", "one");
    store.receive_message("bob", "start");
  }
  const auto records = read_journal_file(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].seq == 1);
  CHECK(records[1].seq == 2);
  Store reopened(std::make_unique<FileJournal>(path));
  CHECK(reopened.last_seq() == 2);
  CHECK(reopened.open_session_of("bob"));
  // A gap in seq is rejected on load.
  {
    std::ofstream out(path, std::ios::app);
    JournalRecord bad;
    bad.seq = 9;
    bad.shout = records[0].shout;
    out << encode_record(bad) << "\n";
  }
  CHECK_THROWS_AS(read_journal_file(path), Error);
}

TEST_CASE("replay equivalence and arrival monotonicity over random workloads") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto path = workload::temp_path("replay.jsonl");
    workload::StepClock clock;
    Store live(std::make_unique<FileJournal>(path), {}, [&] { return clock(); });
    const auto tally = workload::run(live, clock, 500, seed);
    CHECK(tally.accepted > 200);
    CHECK(live.last_seq() == tally.records_expected);

    Store replayed(std::make_unique<FileJournal>(path));
    CHECK(replayed.render_listing(ListingFormat::Json) == live.render_listing(ListingFormat::Json));
    CHECK(replayed.render_listing(ListingFormat::Text) == live.render_listing(ListingFormat::Text));
    const auto a = live.snapshot();
    const auto b = replayed.snapshot();
    CHECK(a.shouts == b.shouts);
    CHECK(a.sessions == b.sessions);
    CHECK(a.users == b.users);

    Timestamp last{};
    for (const auto& s : a.shouts) {
      if (s.kind.is(V::LostTimeslot)) continue;
      CHECK(s.created >= last);
      last = s.created;
    }
  }
}

TEST_CASE("format duality: json listing re-rendered as text") {
  Fixture f;
  workload::run(*f.store, f.clock, 200, 77);
  const auto listing = json::parse(f.store->render_listing(ListingFormat::Json));
  const auto parsed = parse_listing(listing);
  CHECK(render_text(parsed) == f.store->render_listing(ListingFormat::Text));
}

TEST_CASE("concurrent ingestion keeps seq total and arrival ordered") {
  const auto path = workload::temp_path("concurrent.jsonl");
  Store store(std::make_unique<FileJournal>(path));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) store.receive_shout("user" + std::to_string(t), "msg " + std::to_string(i));
    });
  }
  for (auto& th : threads) th.join();
  const auto records = read_journal_file(path);
  REQUIRE(records.size() == 400);
  Timestamp last{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].seq == i + 1);
    CHECK(records[i].shout->created >= last);
    last = records[i].shout->created;
  }
}

TEST_CASE("http endpoints and status codes") {
  workload::StepClock clock;
  Store store(std::make_unique<MemoryJournal>(), {}, [&] { return clock(); });
  HttpServer server(store);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client http("127.0.0.1", port);

  auto r = http.Get("/shout?nick=Bob&msg=slot%20grid%20done%20%23coding");
  REQUIRE(r);
  CHECK(r->status == 200);
  auto body = json::parse(r->body);
  CHECK(body["id"] == "sh-1");
  CHECK(body["shout"]["tags"][0]["name"] == "coding");

  r = http.Post("/shout", httplib::Params{{"nick", "ana"}, {"msg", "posted"}});
  CHECK(r->status == 200);

  r = http.Get("/shout?nick=&msg=x");
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"] == "EmptyNick");

  r = http.Get("/shouts?format=text");
  CHECK(r->status == 200);
  CHECK(r->body == store.render_listing(ListingFormat::Text));
  r = http.Get("/shouts?format=json&nick=bob");
  CHECK(json::parse(r->body).size() == 1);
  r = http.Get("/shouts?since=garbage");
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"] == "BadFilter");

  r = http.Post("/message", httplib::Params{{"nick", "bob"}, {"msg", "stop"}});
  CHECK(r->status == 409);
  CHECK(json::parse(r->body)["error"] == "NoOpenSession");
  r = http.Post("/message", httplib::Params{{"nick", "bob"}, {"msg", "start"}});
  CHECK(r->status == 200);
  const auto sid = json::parse(r->body)["session"]["id"].get<std::string>();

  r = http.Post("/message?nick=bob&msg=push", R"([{"msg":"a","client_created":"2013-05-02T10:00:00Z"},{"msg":"b"}])",
                "application/json");
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["pushed"].size() == 2);

  r = http.Post(("/session/" + sid + "/screencast").c_str(), httplib::Params{{"url", "https://v.example/x"}});
  CHECK(r->status == 200);
  r = http.Post("/session/se-99/screencast", httplib::Params{{"url", "https://v.example/x"}});
  CHECK(r->status == 404);
  r = http.Post(("/session/" + sid + "/review").c_str(), httplib::Params{{"reviewer", "ana"}, {"score", "0.8"}});
  CHECK(r->status == 200);
  r = http.Post(("/session/" + sid + "/review").c_str(), httplib::Params{{"reviewer", "ana"}, {"score", "high"}});
  CHECK(r->status == 400);
  r = http.Get(("/session/" + sid).c_str());
  CHECK(json::parse(r->body)["session"]["screencast"] == "https://v.example/x");

  r = http.Get("/report?n=1");
  CHECK(json::parse(r->body)["latest"].size() == 1);
  server.stop();
}
