// aa: terminal client for the shout server.

#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>

#include "aa/client.hpp"
#include "aa/config.hpp"
#include "aa/text.hpp"

namespace {

enum Exit { kOk = 0, kError = 1, kInvalid = 2, kSpooled = 3 };

int exit_for(const aa::Error& e) {
  switch (e.code()) {
    case aa::ErrorCode::Network:
    case aa::ErrorCode::ServerError:
    case aa::ErrorCode::JournalFailure:
      return kError;
    default:
      return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algorithmic Autoregulation client"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, server, nick, slot, tolerance, spool;
  app.add_option("--config", config_path, "Config file (default: per-user config)");
  app.add_option("--server", server, "Server URL");
  app.add_option("--nick", nick, "Your nick");
  app.add_option("--slot", slot, "Slot length, e.g. 15m");
  app.add_option("--tolerance", tolerance, "Prompt tolerance, e.g. 5m");
  app.add_option("--spool", spool, "Offline spool file");

  auto* shout_cmd = app.add_subcommand("shout", "Log one shout");
  std::vector<std::string> words;
  shout_cmd->add_option("text", words, "What you are working on")->required();

  auto* start_cmd = app.add_subcommand("start", "Start a session and prompt once per slot");
  bool detach = false;
  std::size_t slots = aa::session::kIdealShoutCount;
  start_cmd->add_flag("--detach", detach, "Only open the session on the server");
  start_cmd->add_option("--slots", slots, "Number of prompts")->check(CLI::Range(1, 1000));

  auto* stop_cmd = app.add_subcommand("stop", "Push spooled shouts and close the open session");
  auto* push_cmd = app.add_subcommand("push", "Send spooled shouts");
  auto* status_cmd = app.add_subcommand("status", "Show configuration and server state");
  auto* report_cmd = app.add_subcommand("report", "Latest shouts, open sessions and reviews");
  std::optional<std::size_t> latest;
  report_cmd->add_option("-n", latest, "Number of latest shouts");

  CLI11_PARSE(app, argc, argv);

  try {
    auto env = aa::current_environment();
    auto config = aa::client::load_client_config(
        config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt, env);
    if (server) config.server_url = *server;
    if (nick) config.nick = *nick;
    if (spool) config.offline_spool = *spool;
    auto set_duration = [](const std::optional<std::string>& text, aa::Seconds& target, const char* what) {
      if (!text) return;
      auto d = aa::parse_duration(*text);
      if (!d) throw aa::Error(aa::ErrorCode::BadConfig, std::string("bad ") + what + " '" + *text + "'");
      target = *d;
    };
    set_duration(slot, config.slot, "slot");
    set_duration(tolerance, config.tolerance, "tolerance");
    config.validate();

    aa::client::HttpTransport transport(config.server_url);
    aa::client::Client client(config, transport);

    if (*shout_cmd) {
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      auto outcome = client.shout(text);
      if (outcome.delivery == aa::client::Delivery::Spooled) {
        std::cout << "spooled (" << outcome.detail << "); run 'aa push' later\n";
        return kSpooled;
      }
      std::cout << *outcome.id << "\n";
      return kOk;
    }
    if (*start_cmd) {
      if (detach) {
        auto result = client.start();
        std::cout << "session " << result.at("session").at("id").get<std::string>() << " started\n";
        return kOk;
      }
      aa::client::SystemLoopClock clock;
      aa::client::FdPrompt prompts(STDIN_FILENO, std::cout, clock);
      aa::client::SessionLoop loop(client, clock, prompts, std::cout, slots);
      auto summary = loop.run();
      return summary.stop_result.contains("spool") && summary.stop_result["spool"].value("remaining", 0) > 0
                 ? kSpooled
                 : kOk;
    }
    if (*stop_cmd) {
      auto result = client.stop();
      std::cout << aa::client::describe_stop(result);
      return result["spool"].value("remaining", 0) > 0 ? kSpooled : kOk;
    }
    if (*push_cmd) {
      auto outcome = client.push();
      std::cout << "sent " << outcome.sent << ", rejected " << outcome.rejected << ", remaining "
                << outcome.remaining << "\n";
      if (outcome.error) {
        std::cout << "stopped: " << *outcome.error << "\n";
        return kSpooled;
      }
      return kOk;
    }
    if (*status_cmd) {
      std::cout << client.status().dump(2) << "\n";
      return kOk;
    }
    if (*report_cmd) {
      std::cout << client.report(latest).dump(2) << "\n";
      return kOk;
    }
  } catch (const aa::Error& e) {
    std::cerr << "aa: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "aa: " << e.what() << "\n";
    return kError;
  }
  return kOk;
}
