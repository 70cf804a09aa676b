#include "aa/chat.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>

#include <algorithm>
#include <cstring>
#include <thread>

#include "aa/json_io.hpp"
#include "aa/text.hpp"

namespace aa::chat {

using nlohmann::json;

std::string HttpShoutSink::submit(const std::string& nick, const std::string& message) {
  auto response = transport_.post("/shout", {{"nick", nick}, {"msg", message}, {"source", "chat"}});
  json body;
  try {
    body = json::parse(response.body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::ServerError, "server answered " + std::to_string(response.status));
  }
  if (response.status >= 400) {
    const auto name = body.value("error", std::string("ServerError"));
    throw Error(error_code_from_string(name).value_or(ErrorCode::ServerError), body.value("message", name));
  }
  return body.at("id").get<std::string>();
}

std::vector<std::string> default_info_lines() {
  return {
      "AA: shout every 15 minutes about what you are doing; 8 shouts make a 2h session.",
      "AA: tag shouts with #hashtags or +tags; use #aao0 to shout from any network.",
      "AA: sessions can be peer-validated by a random AA user.",
      "AA: all shouts are public, self-transparency is the point.",
  };
}

ChatAdapter::ChatAdapter(ShoutSink& sink, client::Spool* spool, std::vector<std::string> info_lines)
    : sink_(sink), spool_(spool), info_lines_(std::move(info_lines)) {}

std::optional<std::string> ChatAdapter::handle_line(const ChatEvent& event) {
  const std::string_view text = event.text;
  const bool bare = text == trim_right(kShoutPrefix);
  if (!bare && !text.starts_with(kShoutPrefix)) return std::nullopt;

  std::string nick;
  try {
    nick = normalize_nick(event.nick);
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto message = bare ? std::string() : std::string(text.substr(kShoutPrefix.size()));
  if (trim(message).empty()) {
    return nick + ": usage: ;aa <what you are working on> (logs an AA shout)";
  }

  try {
    const auto id = sink_.submit(nick, message);
    ++logged_;
    std::string reply = nick + ": shout logged (" + id + ")";
    if (!info_lines_.empty()) {
      reply += "\n" + info_lines_[next_info_];
      next_info_ = (next_info_ + 1) % info_lines_.size();
    }
    return reply;
  } catch (const Error& e) {
    if (spool_ && (e.code() == ErrorCode::Network || e.code() == ErrorCode::ServerError ||
                   e.code() == ErrorCode::JournalFailure)) {
      Shout local;
      local.id = "chat-" + std::to_string(to_unix(event.received));
      local.nick = nick;
      local.message = message;
      local.created = event.received;
      local.client_created = event.received;
      local.source = Source::Chat;
      spool_->append(local);
      return nick + ": shout not logged (" + e.what() + "); kept locally for a later push";
    }
    return nick + ": shout not logged (" + e.what() + ")";
  }
}

// ---------------------------------------------------------------------------
// IRC wire protocol

std::optional<IrcMessage> parse_irc_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.empty()) return std::nullopt;
  IrcMessage msg;
  if (line.front() == '@') {
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    line.remove_prefix(sp + 1);
  }
  if (!line.empty() && line.front() == ':') {
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    msg.prefix = std::string(line.substr(1, sp - 1));
    line.remove_prefix(sp + 1);
  }
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  const auto sp = line.find(' ');
  msg.command = std::string(line.substr(0, sp));
  for (auto& c : msg.command) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (msg.command.empty()) return std::nullopt;
  line = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
  while (!line.empty()) {
    if (line.front() == ' ') {
      line.remove_prefix(1);
      continue;
    }
    if (line.front() == ':') {
      msg.params.emplace_back(line.substr(1));
      break;
    }
    const auto next = line.find(' ');
    msg.params.emplace_back(line.substr(0, next));
    if (next == std::string_view::npos) break;
    line.remove_prefix(next + 1);
  }
  return msg;
}

std::string nick_of(std::string_view prefix) {
  const auto bang = prefix.find('!');
  return std::string(prefix.substr(0, bang));
}

std::string sanitize_irc(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != '\r' && c != '\n' && c != '\0') out += c;
  }
  return out;
}

namespace {

class SocketConnection final : public LineConnection {
 public:
  SocketConnection(int fd, SSL_CTX* ctx, SSL* ssl) : fd_(fd), ctx_(ctx), ssl_(ssl) {}

  ~SocketConnection() override {
    if (ssl_) {
      SSL_shutdown(ssl_);
      SSL_free(ssl_);
    }
    if (ctx_) SSL_CTX_free(ctx_);
    ::close(fd_);
  }

  bool send_line(std::string_view line) override {
    std::string data(line);
    data += "\r\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      const auto n = ssl_ ? SSL_write(ssl_, data.data() + sent, static_cast<int>(data.size() - sent))
                          : ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  ReadResult read_line(std::chrono::milliseconds timeout) override {
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        ReadResult r{ReadResult::Status::Line, buffer_.substr(0, nl)};
        buffer_.erase(0, nl + 1);
        if (!r.line.empty() && r.line.back() == '\r') r.line.pop_back();
        return r;
      }
      if (!(ssl_ && SSL_pending(ssl_) > 0)) {
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
        if (ready == 0) return {ReadResult::Status::Timeout, {}};
        if (ready < 0) return {ReadResult::Status::Closed, {}};
      }
      char chunk[4096];
      const auto n = ssl_ ? SSL_read(ssl_, chunk, sizeof chunk) : ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return {ReadResult::Status::Closed, {}};
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  SSL_CTX* ctx_;
  SSL* ssl_;
  std::string buffer_;
};

}  // namespace

std::unique_ptr<LineConnection> connect_tcp(const std::string& host, int port, bool tls) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const auto service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 || !found) {
    throw Error(ErrorCode::Network, "cannot resolve " + host);
  }
  int fd = -1;
  for (auto* ai = found; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw Error(ErrorCode::Network, "cannot connect to " + host + ":" + service);
  if (!tls) return std::make_unique<SocketConnection>(fd, nullptr, nullptr);

  SSL_CTX* ctx = SSL_CTX_new(TLS_client_method());
  SSL* ssl = ctx ? SSL_new(ctx) : nullptr;
  if (!ssl) {
    if (ctx) SSL_CTX_free(ctx);
    ::close(fd);
    throw Error(ErrorCode::Network, "cannot create TLS context");
  }
  SSL_CTX_set_default_verify_paths(ctx);
  SSL_set_verify(ssl, SSL_VERIFY_PEER, nullptr);
  SSL_set_tlsext_host_name(ssl, host.c_str());
  SSL_set1_host(ssl, host.c_str());
  SSL_set_fd(ssl, fd);
  if (SSL_connect(ssl) != 1) {
    char err[256];
    ERR_error_string_n(ERR_get_error(), err, sizeof err);
    SSL_free(ssl);
    SSL_CTX_free(ctx);
    ::close(fd);
    throw Error(ErrorCode::Network, std::string("TLS handshake failed: ") + err);
  }
  return std::make_unique<SocketConnection>(fd, ctx, ssl);
}

// ---------------------------------------------------------------------------
// Bot

IrcBot::IrcBot(BotConfig config, ChatAdapter& adapter, ConnectFn connect, SleepFn sleep)
    : config_(std::move(config)), adapter_(adapter), connect_(std::move(connect)), sleep_(std::move(sleep)) {
  if (!connect_) {
    connect_ = [this] { return connect_tcp(config_.host, config_.port, config_.tls); };
  }
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

int IrcBot::run() {
  int failures = 0;
  while (!stop_) {
    std::unique_ptr<LineConnection> conn;
    try {
      conn = connect_();
    } catch (const Error& e) {
      diagnostic_ = e.what();
    }
    if (conn) {
      const auto before = sessions_.load();
      const auto end = serve(*conn);
      if (end == End::Stopped) return 0;
      if (end == End::Fatal) return 1;
      if (sessions_ > before) failures = 0;
    }
    if (stop_) return 0;
    ++failures;
    if (config_.max_attempts > 0 && failures >= config_.max_attempts) {
      diagnostic_ = "giving up after " + std::to_string(failures) + " attempts: " + diagnostic_;
      return 1;
    }
    const auto delay = config_.backoff_initial * (1LL << std::min(failures - 1, 20));
    sleep_(std::min<std::chrono::milliseconds>(delay, config_.backoff_max));
  }
  return 0;
}

void IrcBot::reply(LineConnection& conn, const ChatEvent& event, const std::string& text) {
  const auto target = config_.reply_mode == BotConfig::ReplyMode::Channel ? event.channel : event.nick;
  const char* verb = config_.reply_mode == BotConfig::ReplyMode::Channel ? "PRIVMSG " : "NOTICE ";
  for (const auto& line : split(text, '\n')) {
    if (!line.empty()) conn.send_line(verb + target + " :" + sanitize_irc(line));
  }
}

IrcBot::End IrcBot::serve(LineConnection& conn) {
  current_nick_ = config_.nick;
  if (config_.password) conn.send_line("PASS " + sanitize_irc(*config_.password));
  conn.send_line("NICK " + current_nick_);
  conn.send_line("USER " + config_.user + " 0 * :" + sanitize_irc(config_.realname));
  bool registered = false;

  while (!stop_) {
    const auto r = conn.read_line(config_.poll_interval);
    if (r.status == ReadResult::Status::Timeout) continue;
    if (r.status == ReadResult::Status::Closed) {
      diagnostic_ = "connection closed";
      return End::Disconnected;
    }
    const auto msg = parse_irc_line(r.line);
    if (!msg) continue;
    const auto& cmd = msg->command;
    if (cmd == "PING") {
      conn.send_line("PONG :" + (msg->params.empty() ? std::string() : msg->params.back()));
    } else if (cmd == "001") {
      registered = true;
      ++sessions_;
      conn.send_line("JOIN " + config_.channel);
    } else if (cmd == "433" && !registered) {
      current_nick_ += "_";
      conn.send_line("NICK " + current_nick_);
    } else if (cmd == "464" || cmd == "465") {
      diagnostic_ = "server refused the bot: " + (msg->params.empty() ? cmd : msg->params.back());
      return End::Fatal;
    } else if (cmd == "ERROR") {
      diagnostic_ = msg->params.empty() ? "server error" : msg->params.back();
      return End::Disconnected;
    } else if (cmd == "PRIVMSG" && msg->params.size() >= 2) {
      const auto& target = msg->params[0];
      if (target.empty() || (target.front() != '#' && target.front() != '&')) continue;
      ChatEvent event{config_.network, target, nick_of(msg->prefix), msg->params[1], now_utc()};
      if (to_lower(event.nick) == to_lower(current_nick_)) continue;
      if (auto text = adapter_.handle_line(event)) reply(conn, event, *text);
    }
  }
  conn.send_line("QUIT :bye");
  return End::Stopped;
}

}  // namespace aa::chat
