// aa-bot: IRC bot that logs ";aa " lines as shouts.

#include <csignal>

#include <CLI11.hpp>
#include <iostream>

#include "aa/chat.hpp"
#include "aa/config.hpp"

namespace {

aa::chat::IrcBot* running = nullptr;

void on_signal(int) {
  if (running) running->request_stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRC bot for AA shouts"};
  std::optional<std::string> config_path, host, channel, nick, server, reply, spool;
  std::optional<int> port, attempts;
  bool tls = false;
  app.add_option("--config", config_path, "Config file ([bot] keys or top-level keys)");
  app.add_option("--host", host, "IRC server host");
  app.add_option("--port", port, "IRC server port");
  app.add_flag("--tls", tls, "Use TLS");
  app.add_option("--channel", channel, "Channel to join");
  app.add_option("--nick", nick, "Bot nick");
  app.add_option("--server", server, "AA server URL");
  app.add_option("--reply", reply, "channel | notice")->check(CLI::IsMember({"channel", "notice"}));
  app.add_option("--spool", spool, "Spool for shouts the server could not take");
  app.add_option("--max-attempts", attempts, "Give up after this many failed connects (0 = never)");
  CLI11_PARSE(app, argc, argv);

  try {
    aa::Config config;
    if (config_path) config = aa::Config::load(*config_path);
    config.apply_env();
    auto pick = [&](const char* key, const std::optional<std::string>& flag) -> std::optional<std::string> {
      if (flag) return flag;
      for (const auto& section : config.sections("bot")) {
        if (auto it = section.values.find(key); it != section.values.end()) return it->second;
      }
      return config.get(key);
    };

    aa::chat::BotConfig bot;
    bot.host = pick("host", host).value_or(bot.host);
    if (port) {
      bot.port = *port;
    } else if (auto p = pick("port", std::nullopt)) {
      bot.port = std::stoi(*p);
    }
    const auto tls_text = pick("tls", std::nullopt).value_or("false");
    bot.tls = tls || tls_text == "true" || tls_text == "1" || tls_text == "on";
    bot.channel = pick("channel", channel).value_or(bot.channel);
    bot.nick = pick("nick", nick).value_or(bot.nick);
    bot.user = pick("user", std::nullopt).value_or(bot.nick);
    bot.network = pick("network", std::nullopt).value_or(bot.host);
    bot.password = pick("password", std::nullopt);
    if (pick("reply", reply).value_or("channel") == "notice") bot.reply_mode = aa::chat::BotConfig::ReplyMode::Notice;
    if (attempts) bot.max_attempts = *attempts;

    const auto server_url = pick("server", server).value_or("http://127.0.0.1:8080");
    aa::client::HttpTransport transport(server_url);
    aa::chat::HttpShoutSink sink(transport);
    std::unique_ptr<aa::client::Spool> spool_file;
    if (auto s = pick("spool", spool)) spool_file = std::make_unique<aa::client::Spool>(*s);
    aa::chat::ChatAdapter adapter(sink, spool_file.get());
    aa::chat::IrcBot irc(bot, adapter);

    running = &irc;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "connecting to " << bot.host << ":" << bot.port << " as " << bot.nick << ", channel " << bot.channel
              << std::endl;
    const int code = irc.run();
    running = nullptr;
    if (code != 0) std::cerr << "aa-bot: " << irc.diagnostic() << "\n";
    return code;
  } catch (const aa::Error& e) {
    std::cerr << "aa-bot: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "aa-bot: " << e.what() << "\n";
    return 1;
  }
}
