#include <doctest.h>

#include <unistd.h>

#include <deque>
#include <fstream>
#include <sstream>

#include "aa/client.hpp"
#include "aa/http_server.hpp"
#include "aa/store.hpp"
#include "workload.hpp"

using namespace aa;
using namespace aa::client;
using nlohmann::json;

namespace {

// Forwards to a real transport and injects failures on request.
class FaultyTransport final : public Transport {
 public:
  explicit FaultyTransport(Transport& inner) : inner_(inner) {}

  Response get(const std::string& path, const Params& params) override {
    maybe_fail();
    return inner_.get(path, params);
  }
  Response post(const std::string& path, const Params& params, const std::string& body,
                const std::string& content_type) override {
    maybe_fail();
    ++posts;
    return inner_.post(path, params, body, content_type);
  }

  // Allow `n` more calls, then fail every call.
  std::optional<std::size_t> budget;
  bool down = false;
  std::size_t posts = 0;

 private:
  void maybe_fail() {
    if (down) throw Error(ErrorCode::Network, "connection refused");
    if (budget) {
      if (*budget == 0) throw Error(ErrorCode::Network, "connection reset");
      --*budget;
    }
  }
  Transport& inner_;
};

struct Rig {
  ManualClock clock{from_unix(1367496000)};
  server::Store store{std::make_unique<server::MemoryJournal>(), {}, [this] { return clock.now(); }};
  server::HttpServer http{store};
  int port = http.start("127.0.0.1", 0);
  HttpTransport wire{"http://127.0.0.1:" + std::to_string(port)};
  FaultyTransport transport{wire};

  ClientConfig config(const std::string& nick = "bob") {
    ClientConfig c;
    c.server_url = "http://127.0.0.1:" + std::to_string(port);
    c.nick = nick;
    c.offline_spool = workload::temp_path("spool.jsonl");
    return c;
  }
  ~Rig() { http.stop(); }
};

class ScriptedPrompt final : public PromptSource {
 public:
  ScriptedPrompt(std::deque<PromptReply> replies, LoopClock& clock, Seconds think)
      : replies_(std::move(replies)), clock_(clock), think_(think) {}

  PromptReply ask(std::int64_t slot, Timestamp deadline) override {
    asked.push_back(slot);
    if (replies_.empty()) return {PromptReply::Kind::Stop, {}};
    auto r = replies_.front();
    replies_.pop_front();
    if (r.kind == PromptReply::Kind::Timeout) {
      clock_.sleep_until(deadline);
    } else {
      clock_.sleep_until(clock_.now() + think_);
    }
    return r;
  }
  std::vector<std::int64_t> asked;

 private:
  std::deque<PromptReply> replies_;
  LoopClock& clock_;
  Seconds think_;
};

PromptReply answer(std::string text) { return {PromptReply::Kind::Answer, std::move(text)}; }

}  // namespace

TEST_CASE("shout is delivered in one call") {
  Rig rig;
  Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
  auto out = client.shout("slot grid done #coding");
  CHECK(out.delivery == Delivery::Sent);
  CHECK(out.id == "sh-1");
  CHECK(rig.transport.posts == 1);
  CHECK_THROWS_AS(client.shout("   "), Error);
  CHECK(rig.transport.posts == 1);
}

class CannedTransport final : public Transport {
 public:
  Response canned;
  Response get(const std::string&, const Params&) override { return canned; }
  Response post(const std::string&, const Params&, const std::string&, const std::string&) override { return canned; }
};

TEST_CASE("client errors are rethrown, server errors are spooled") {
  CannedTransport transport;
  ClientConfig cfg;
  cfg.nick = "bob";
  cfg.offline_spool = workload::temp_path("spool.jsonl");
  Client client(cfg, transport);

  transport.canned = {400, R"({"error":"EmptyNick","message":"nick is empty"})"};
  try {
    client.shout("hello");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyNick);
  }
  CHECK(client.spool().size() == 0);

  transport.canned = {503, "unavailable"};
  CHECK(client.shout("hello").delivery == Delivery::Spooled);
  CHECK(client.spool().size() == 1);
}

TEST_CASE("offline shouts are spooled and pushed in order with their client time") {
  Rig rig;
  Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
  rig.transport.down = true;
  for (int i = 0; i < 3; ++i) {
    auto out = client.shout("offline " + std::to_string(i));
    CHECK(out.delivery == Delivery::Spooled);
    CHECK_FALSE(out.detail.empty());
    rig.clock.advance(Seconds{60});
  }
  CHECK(client.spool().size() == 3);

  // The connection drops after the first delivery: exactly two remain.
  rig.transport.down = false;
  rig.transport.budget = 1;
  auto partial = client.push();
  CHECK(partial.sent == 1);
  CHECK(partial.remaining == 2);
  CHECK(partial.error);
  CHECK(client.spool().size() == 2);
  CHECK(client.spool().load().front().message == "offline 1");

  rig.transport.budget.reset();
  auto rest = client.push();
  CHECK(rest.sent == 2);
  CHECK(rest.remaining == 0);
  CHECK(client.spool().size() == 0);

  const auto stored = rig.store.list();
  REQUIRE(stored.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(stored[i].message == "offline " + std::to_string(i));
    CHECK(stored[i].client_created == from_unix(1367496000 + 60 * i));
  }
}

TEST_CASE("session loop prompts on the slot grid and records lost slots") {
  Rig rig;
  Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
  std::deque<PromptReply> replies;
  for (int i = 0; i < 8; ++i) replies.push_back(i == 3 ? PromptReply{} : answer("work item " + std::to_string(i)));
  ScriptedPrompt prompts(replies, rig.clock, Seconds{20});
  std::ostringstream out;
  SessionLoop loop(client, rig.clock, prompts, out);
  const auto anchor = rig.clock.now();
  auto summary = loop.run();

  REQUIRE(summary.prompt_times.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto expected = anchor + static_cast<std::int64_t>(i) * kDefaultSlot;
    CHECK(std::chrono::abs(summary.prompt_times[i] - expected) <= Seconds{1});
  }
  CHECK(summary.answered == 7);
  CHECK(summary.lost == std::vector<std::int64_t>{3});
  const auto& conf = summary.stop_result.at("conformance");
  CHECK(conf.at("lost_slots") == json::array({3}));
  CHECK(conf.at("per_shout").size() == 7);
  CHECK_FALSE(conf.at("ideal").get<bool>());
  CHECK(out.str().find("recorded as lost") != std::string::npos);
}

TEST_CASE("session loop: full session is ideal, immediate stop is safe") {
  {
    Rig rig;
    Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
    std::deque<PromptReply> replies;
    for (int i = 0; i < 8; ++i) replies.push_back(answer("step " + std::to_string(i)));
    ScriptedPrompt prompts(replies, rig.clock, Seconds{30});
    std::ostringstream out;
    auto summary = SessionLoop(client, rig.clock, prompts, out).run();
    CHECK(summary.stop_result.at("conformance").at("ideal").get<bool>());
    CHECK(describe_stop(summary.stop_result).find("ideal: yes") != std::string::npos);
  }
  {
    Rig rig;
    Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
    ScriptedPrompt prompts({}, rig.clock, Seconds{0});
    std::ostringstream out;
    auto summary = SessionLoop(client, rig.clock, prompts, out).run();
    CHECK(summary.answered == 0);
    CHECK(summary.stop_result.at("note") == "EmptySession");
    CHECK_FALSE(rig.store.open_session_of("bob"));
  }
}

TEST_CASE("stop pushes the spool before closing") {
  Rig rig;
  Client client(rig.config(), rig.transport, [&] { return rig.clock.now(); });
  client.start();
  rig.transport.down = true;
  rig.clock.advance(Seconds{60});
  client.shout("while offline");
  rig.transport.down = false;
  rig.clock.advance(Seconds{600});
  auto result = client.stop();
  CHECK(result.at("spool").at("sent") == 1);
  CHECK(result.at("session").at("shouts").size() == 1);
}

TEST_CASE("client configuration file and environment") {
  const auto path = workload::temp_path("config");
  std::ofstream(path) << "server = http://example.org:9000\nnick = Ana\nslot = 10m\ntolerance = 2m\nspool = /tmp/x.jsonl\n";
  auto cfg = load_client_config(path, {});
  CHECK(cfg.server_url == "http://example.org:9000");
  CHECK(cfg.nick == "Ana");
  CHECK(cfg.slot == Seconds{600});
  CHECK(cfg.tolerance == Seconds{120});
  CHECK(cfg.offline_spool == "/tmp/x.jsonl");
  cfg.validate();

  auto env = load_client_config(path, {{"AA_NICK", "cy"}, {"AA_SERVER", "http://h:1"}});
  CHECK(env.nick == "cy");
  CHECK(env.server_url == "http://h:1");

  std::ofstream(path) << "nick = ana\nslot = 10m\ntolerance = 6m\n";
  CHECK_THROWS_AS(load_client_config(path, {}).validate(), Error);
}

TEST_CASE("terminal prompt reads waiting input even after the window closed") {
  int fds[2];
  REQUIRE(::pipe(fds) == 0);
  const std::string typed = "first answer\n\nstop\n";
  REQUIRE(::write(fds[1], typed.data(), typed.size()) == static_cast<ssize_t>(typed.size()));
  ManualClock clock(from_unix(1000));
  std::ostringstream out;
  FdPrompt prompt(fds[0], out, clock);
  auto r = prompt.ask(0, from_unix(900));
  CHECK(r.kind == PromptReply::Kind::Answer);
  CHECK(r.text == "first answer");
  CHECK(prompt.ask(1, from_unix(900)).kind == PromptReply::Kind::Stop);
  CHECK(prompt.ask(2, from_unix(900)).kind == PromptReply::Kind::Timeout);
  ::close(fds[1]);
  CHECK(prompt.ask(3, from_unix(2000)).kind == PromptReply::Kind::Stop);
  ::close(fds[0]);
  CHECK(out.str().find("[slot 1]") != std::string::npos);
}
