#pragma once

// Terminal client: one-call shouting with an offline spool, push of spooled
// shouts, and the timed session loop that prompts once per slot.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "aa/model.hpp"

namespace aa::client {

struct ClientConfig {
  std::string server_url = "http://127.0.0.1:8080";
  std::string nick;
  Seconds slot = kDefaultSlot;
  Seconds tolerance = kDefaultTolerance;
  std::filesystem::path offline_spool;

  // Throws BadConfig (slot/tolerance) or EmptyNick.
  void validate() const;
};

std::filesystem::path default_config_path();
std::filesystem::path default_spool_path();

// File keys: server, nick, slot, tolerance, spool. AA_SERVER and AA_NICK override.
ClientConfig load_client_config(const std::optional<std::filesystem::path>& path,
                                const std::map<std::string, std::string>& env);

using Params = std::vector<std::pair<std::string, std::string>>;

struct Response {
  int status = 0;
  std::string body;
};

// Throws Error(Network) when the server cannot be reached.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response get(const std::string& path, const Params& params) = 0;
  virtual Response post(const std::string& path, const Params& params, const std::string& body = {},
                        const std::string& content_type = {}) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& server_url, Seconds timeout = Seconds{10});
  ~HttpTransport() override;

  Response get(const std::string& path, const Params& params) override;
  Response post(const std::string& path, const Params& params, const std::string& body = {},
                const std::string& content_type = {}) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Locally held shouts, in the same JSON-lines record format as the server journal.
class Spool {
 public:
  explicit Spool(std::filesystem::path path) : path_(std::move(path)) {}

  void append(const Shout& shout);
  std::vector<Shout> load() const;
  // Rewrites the spool to exactly `remaining`, atomically.
  void replace(std::span<const Shout> remaining);
  std::size_t size() const { return load().size(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

enum class Delivery { Sent, Spooled };

struct ShoutOutcome {
  Delivery delivery = Delivery::Sent;
  std::optional<std::string> id;
  std::string detail;
};

struct PushOutcome {
  std::size_t sent = 0;
  std::size_t rejected = 0;
  std::size_t remaining = 0;
  std::optional<std::string> error;
};

class Client {
 public:
  Client(ClientConfig config, Transport& transport, std::function<Timestamp()> clock = now_utc);

  // Validates locally (EmptyMessage), sends one /shout call and spools on
  // network or server failure. Client errors from the server are rethrown.
  ShoutOutcome shout(std::string_view message);

  // Sends spooled shouts in order with client_created; truncates after each ack.
  PushOutcome push();

  nlohmann::json start();
  // Replays the spool first.
  nlohmann::json stop();
  nlohmann::json lost(const std::string& session_id, std::int64_t slot);
  nlohmann::json session(const std::string& session_id);
  nlohmann::json report(std::optional<std::size_t> latest = std::nullopt);
  nlohmann::json status();

  const ClientConfig& config() const { return config_; }
  Spool& spool() { return spool_; }

 private:
  nlohmann::json checked(const Response& response) const;

  ClientConfig config_;
  Transport& transport_;
  std::function<Timestamp()> clock_;
  Spool spool_;
};

class LoopClock {
 public:
  virtual ~LoopClock() = default;
  virtual Timestamp now() = 0;
  virtual void sleep_until(Timestamp t) = 0;
};

class SystemLoopClock final : public LoopClock {
 public:
  Timestamp now() override { return now_utc(); }
  void sleep_until(Timestamp t) override;
};

// Virtual time: sleeping jumps the clock forward.
class ManualClock final : public LoopClock {
 public:
  explicit ManualClock(Timestamp start) : now_(to_unix(start)) {}
  Timestamp now() override { return from_unix(now_.load()); }
  void sleep_until(Timestamp t) override;
  void advance(Seconds d) { now_ += d.count(); }

 private:
  std::atomic<std::int64_t> now_;
};

struct PromptReply {
  enum class Kind { Answer, Timeout, Stop };
  Kind kind = Kind::Timeout;
  std::string text;
};

class PromptSource {
 public:
  virtual ~PromptSource() = default;
  // Blocks until the user answers, the deadline passes, or the user stops.
  virtual PromptReply ask(std::int64_t slot, Timestamp deadline) = 0;
};

// Reads lines from a file descriptor with a deadline; "stop" or EOF ends the session.
class FdPrompt final : public PromptSource {
 public:
  FdPrompt(int fd, std::ostream& out, LoopClock& clock) : fd_(fd), out_(out), clock_(clock) {}
  PromptReply ask(std::int64_t slot, Timestamp deadline) override;

 private:
  int fd_;
  std::ostream& out_;
  LoopClock& clock_;
  std::string buffer_;
};

struct SessionSummary {
  std::string session_id;
  std::vector<Timestamp> prompt_times;
  std::size_t answered = 0;
  std::vector<std::int64_t> lost;
  nlohmann::json stop_result;
};

class SessionLoop {
 public:
  SessionLoop(Client& client, LoopClock& clock, PromptSource& prompts, std::ostream& out,
              std::size_t slots = 8)
      : client_(client), clock_(clock), prompts_(prompts), out_(out), slots_(slots) {}

  SessionSummary run();

 private:
  Client& client_;
  LoopClock& clock_;
  PromptSource& prompts_;
  std::ostream& out_;
  std::size_t slots_;
};

// One-paragraph human rendering of a stop result.
std::string describe_stop(const nlohmann::json& stop_result);

}  // namespace aa::client
