#pragma once

// IRC bot adapter: channel lines prefixed ";aa " become shouts attributed to
// the sender, and the bot replies with a confirmation or the error.

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aa/client.hpp"
#include "aa/model.hpp"

namespace aa::chat {

inline constexpr std::string_view kShoutPrefix = ";aa ";

struct ChatEvent {
  std::string network;
  std::string channel;
  std::string nick;
  std::string text;  // verbatim
  Timestamp received{};
};

// Receives shouts on behalf of chat users. Returns the shout id; throws Error.
class ShoutSink {
 public:
  virtual ~ShoutSink() = default;
  virtual std::string submit(const std::string& nick, const std::string& message) = 0;
};

class HttpShoutSink final : public ShoutSink {
 public:
  explicit HttpShoutSink(client::Transport& transport) : transport_(transport) {}
  std::string submit(const std::string& nick, const std::string& message) override;

 private:
  client::Transport& transport_;
};

std::vector<std::string> default_info_lines();

class ChatAdapter {
 public:
  // `spool` keeps shouts that could not reach the server; it may be null.
  ChatAdapter(ShoutSink& sink, client::Spool* spool = nullptr,
              std::vector<std::string> info_lines = default_info_lines());

  // Reply for the channel (possibly two lines joined by '\n'), or nothing for
  // lines without the prefix.
  std::optional<std::string> handle_line(const ChatEvent& event);

  std::size_t logged() const { return logged_; }

 private:
  ShoutSink& sink_;
  client::Spool* spool_;
  std::vector<std::string> info_lines_;
  std::size_t next_info_ = 0;
  std::size_t logged_ = 0;
};

// ---------------------------------------------------------------------------
// IRC wire protocol

struct IrcMessage {
  std::string prefix;
  std::string command;
  std::vector<std::string> params;
};

std::optional<IrcMessage> parse_irc_line(std::string_view line);
std::string nick_of(std::string_view prefix);
// Strips CR/LF so a reply cannot inject extra protocol lines.
std::string sanitize_irc(std::string_view text);

struct ReadResult {
  enum class Status { Line, Timeout, Closed };
  Status status = Status::Closed;
  std::string line;
};

class LineConnection {
 public:
  virtual ~LineConnection() = default;
  virtual bool send_line(std::string_view line) = 0;
  virtual ReadResult read_line(std::chrono::milliseconds timeout) = 0;
};

// Throws Error(Network) when the connection cannot be established.
std::unique_ptr<LineConnection> connect_tcp(const std::string& host, int port, bool tls);

struct BotConfig {
  enum class ReplyMode { Channel, Notice };

  std::string network = "irc";
  std::string host = "127.0.0.1";
  int port = 6667;
  bool tls = false;
  std::string channel = "#aa";
  std::string nick = "aabot";
  std::string user = "aabot";
  std::string realname = "AA shout logger";
  std::optional<std::string> password;
  ReplyMode reply_mode = ReplyMode::Channel;
  std::chrono::milliseconds backoff_initial{1000};
  std::chrono::milliseconds backoff_max{5 * 60 * 1000};
  int max_attempts = 0;  // consecutive failed connects before giving up; 0 = never
  std::chrono::milliseconds poll_interval{200};
};

class IrcBot {
 public:
  using ConnectFn = std::function<std::unique_ptr<LineConnection>()>;
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  IrcBot(BotConfig config, ChatAdapter& adapter, ConnectFn connect = {}, SleepFn sleep = {});

  // Returns 0 after request_stop(), 1 on permanent failure (see diagnostic()).
  int run();
  void request_stop() { stop_ = true; }

  std::size_t sessions() const { return sessions_; }
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  enum class End { Disconnected, Fatal, Stopped };
  End serve(LineConnection& conn);
  void reply(LineConnection& conn, const ChatEvent& event, const std::string& text);

  BotConfig config_;
  ChatAdapter& adapter_;
  ConnectFn connect_;
  SleepFn sleep_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> sessions_{0};
  std::string current_nick_;
  std::string diagnostic_;
};

}  // namespace aa::chat
